/* Minimal consumer of the C interface.
 *
 * Build from the repository root after `cargo build -p contour-chain-capi`:
 *   cc crates/capi/examples/demo.c -Icrates/capi/include \
 *      -Ltarget/debug -l:libcontour_chain_capi.a -lpthread -ldl -lm -o demo
 */
#include <stdio.h>
#include <stdlib.h>

#include "contour_chain.h"

static void check(CcnStatus status) {
    if (status != CCN_STATUS_OK) {
        fprintf(stderr, "error: %s\n", ccn_status_message(status));
        exit(2);
    }
}

int main(void) {
    CcnParams *params = NULL;
    check(ccn_params_new(3, 5, 2, &params));

    uint32_t state[3] = {1, 5, 8};
    CcnAnalysis *analysis = NULL;
    check(ccn_find_cycle(params, state, 3, 0, &analysis));

    uint64_t period = 0, numerator = 0, denominator = 0;
    check(ccn_analysis_period(analysis, &period));
    check(ccn_analysis_velocity(analysis, &numerator, &denominator));
    printf("period %llu velocity %llu/%llu\n", (unsigned long long)period,
           (unsigned long long)numerator, (unsigned long long)denominator);

    ccn_analysis_free(analysis);
    ccn_params_free(params);
    return (period == 21 && numerator == 20 && denominator == 21) ? 0 : 1;
}
