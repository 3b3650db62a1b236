/* C interface for the contour chain simulator. */

#ifndef CONTOUR_CHAIN_H
#define CONTOUR_CHAIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcnStatus {
  CCN_STATUS_OK = 0,
  CCN_STATUS_NULL_POINTER = 1,
  CCN_STATUS_INVALID_PARAMS = 2,
  CCN_STATUS_INVALID_STATE = 3,
  CCN_STATUS_INADMISSIBLE = 4,
  CCN_STATUS_BUDGET_EXHAUSTED = 5,
  CCN_STATUS_INFEASIBLE = 6,
  CCN_STATUS_VERIFICATION_FAILED = 7,
  CCN_STATUS_BUFFER_TOO_SMALL = 8,
} CcnStatus;

typedef enum CcnRegime {
  CCN_REGIME_COLLAPSE = 0,
  CCN_REGIME_FREE_MOVEMENT = 1,
  CCN_REGIME_DELAYED_CYCLE = 2,
} CcnRegime;

/**
 * Delay types observed over one period of the terminal cycle.
 */
typedef enum CcnDelayKind {
  CCN_DELAY_KIND_NONE = 0,
  CCN_DELAY_KIND_FIRST = 1,
  CCN_DELAY_KIND_SECOND = 2,
  CCN_DELAY_KIND_MIXED = 3,
} CcnDelayKind;

typedef struct CcnAnalysis CcnAnalysis;

typedef struct CcnParams CcnParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Allocate a parameter handle for `contours` contours of `2 * half_cells`
 * cells each and clusters of `cluster_len` particles.
 *
 * # Safety
 * `out` must be a valid pointer to a `CcnParams*` slot.
 */
enum CcnStatus ccn_params_new(uint32_t contours,
                              uint32_t half_cells,
                              uint32_t cluster_len,
                              struct CcnParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`ccn_params_new`] not yet freed.
 */
void ccn_params_free(struct CcnParams *params);

/**
 * Cells per contour (`2 * half_cells`). Returns 0 on a null handle.
 *
 * # Safety
 * `params` must be null or a live handle from [`ccn_params_new`].
 */
uint32_t ccn_params_cells(const struct CcnParams *params);

/**
 * Test whether `positions` (length `len`, one leading cell per contour) is
 * an admissible state.
 *
 * # Safety
 * `params` must be null or a live handle; `positions` must point to `len`
 * readable `uint32_t`s; `out` must be writable.
 */
enum CcnStatus ccn_is_admissible(const struct CcnParams *params,
                                 const uint32_t *positions,
                                 uintptr_t len,
                                 bool *out);

/**
 * Advance one step. Writes `len` cells to `next_out`; when `moved_out` is
 * non-null it receives one flag per cluster.
 *
 * # Safety
 * `positions` must point to `len` readable `uint32_t`s; `next_out` (and
 * `moved_out` when non-null) must have room for `len` entries.
 */
enum CcnStatus ccn_step(const struct CcnParams *params,
                        const uint32_t *positions,
                        uintptr_t len,
                        uint32_t *next_out,
                        bool *moved_out);

/**
 * Run the trajectory from `positions` to its terminal cycle. `budget` caps
 * the searched prefix; 0 means no explicit cap (the state-space size is
 * used, which always suffices).
 *
 * # Safety
 * `positions` must point to `len` readable `uint32_t`s; `out` must be a
 * valid pointer to a `CcnAnalysis*` slot.
 */
enum CcnStatus ccn_find_cycle(const struct CcnParams *params,
                              const uint32_t *positions,
                              uintptr_t len,
                              uint64_t budget,
                              struct CcnAnalysis **out);

/**
 * # Safety
 * `analysis` must be null or a handle from [`ccn_find_cycle`] not yet freed.
 */
void ccn_analysis_free(struct CcnAnalysis *analysis);

/**
 * # Safety
 * `analysis` must be null or a live handle; `out` null or writable.
 */
enum CcnStatus ccn_analysis_transient(const struct CcnAnalysis *analysis, uint64_t *out);

/**
 * # Safety
 * `analysis` must be null or a live handle; `out` null or writable.
 */
enum CcnStatus ccn_analysis_period(const struct CcnAnalysis *analysis, uint64_t *out);

/**
 * Common long-run velocity as a reduced fraction.
 *
 * # Safety
 * `analysis` must be null or a live handle; `numerator` and `denominator`
 * null or writable.
 */
enum CcnStatus ccn_analysis_velocity(const struct CcnAnalysis *analysis,
                                     uint64_t *numerator,
                                     uint64_t *denominator);

/**
 * # Safety
 * `analysis` must be null or a live handle; `out` null or writable.
 */
enum CcnStatus ccn_analysis_regime(const struct CcnAnalysis *analysis, enum CcnRegime *out);

/**
 * # Safety
 * `analysis` must be null or a live handle; `out` null or writable.
 */
enum CcnStatus ccn_analysis_delay_kind(const struct CcnAnalysis *analysis, enum CcnDelayKind *out);

/**
 * Cells advanced per cluster over one period. Two-call pattern.
 *
 * # Safety
 * `moves_out` must be null or have room for `capacity` entries; `written`
 * must be writable.
 */
enum CcnStatus ccn_analysis_moves(const struct CcnAnalysis *analysis,
                                  uint64_t *moves_out,
                                  uintptr_t capacity,
                                  uintptr_t *written);

/**
 * Theoretical candidate velocities, descending, as parallel
 * numerator/denominator arrays. Two-call pattern.
 *
 * # Safety
 * `numerators`/`denominators` must be null or have room for `capacity`
 * entries; `written` must be writable.
 */
enum CcnStatus ccn_candidate_velocities(const struct CcnParams *params,
                                        uint64_t *numerators,
                                        uint64_t *denominators,
                                        uintptr_t capacity,
                                        uintptr_t *written);

/**
 * Exhaustive velocity spectrum as a JSON document (schema_version 1).
 * `budget` 0 selects the default enumeration cap. Free the string with
 * `ccn_string_free`.
 *
 * # Safety
 * `params` must be null or a live handle; `out` must be a valid pointer
 * to a `char*` slot.
 */
enum CcnStatus ccn_spectrum_json(const struct CcnParams *params, uint64_t budget, char **out);

/**
 * Build the cycle state realizing the delay decomposition `delays`
 * (`turns` entries; `second_type` selects the mirrored family). Writes one
 * cell per contour to `state_out`.
 *
 * # Safety
 * `delays` must point to `turns` readable `uint64_t`s; `state_out` must
 * have room for one `uint32_t` per contour.
 */
enum CcnStatus ccn_construct(const struct CcnParams *params,
                             const uint64_t *delays,
                             uintptr_t turns,
                             bool second_type,
                             uint32_t *state_out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ccn_string_free(char *s);

/**
 * Static description of a status code.
 */
const char *ccn_status_message(enum CcnStatus status);

/**
 * Library version as a static string.
 */
const char *ccn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTOUR_CHAIN_H */
