//! C ABI over the contour chain simulator.
//!
//! Conventions: every function returns a `CcnStatus`; results travel through
//! out-parameters. Handles (`CcnParams`, `CcnAnalysis`) are opaque and owned
//! by the caller until passed to the matching `_free`. Variable-length
//! results use the two-call pattern: invoke with capacity 0 to learn the
//! required length, then again with a buffer.

use std::ffi::{c_char, CString};
use std::slice;

use contour_chain::{
    candidate_velocities, construct_cycle_state, empirical_spectrum, find_cycle, ChainError,
    ChainParams, CycleAnalysis, CycleOptions, DelayDecomposition, DelayPurity, Detection,
    Exploration, OrbitError, Regime, SpectrumError, SystemState, DEFAULT_BUDGET,
};

pub struct CcnParams {
    inner: ChainParams,
}

pub struct CcnAnalysis {
    inner: CycleAnalysis,
}

#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CcnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    InvalidState = 3,
    Inadmissible = 4,
    BudgetExhausted = 5,
    Infeasible = 6,
    VerificationFailed = 7,
    BufferTooSmall = 8,
}

#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CcnRegime {
    Collapse = 0,
    FreeMovement = 1,
    DelayedCycle = 2,
}

/// Delay types observed over one period of the terminal cycle.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CcnDelayKind {
    None = 0,
    First = 1,
    Second = 2,
    Mixed = 3,
}

fn chain_status(err: &ChainError) -> CcnStatus {
    match err {
        ChainError::TooFewContours(_)
        | ChainError::ZeroHalfCells
        | ChainError::ClusterLenOutOfRange { .. } => CcnStatus::InvalidParams,
        ChainError::WrongArity { .. }
        | ChainError::PositionOutOfRange { .. }
        | ChainError::IndexOutOfRange { .. } => CcnStatus::InvalidState,
        ChainError::Inadmissible => CcnStatus::Inadmissible,
    }
}

fn orbit_status(err: &OrbitError) -> CcnStatus {
    match err {
        OrbitError::BadState(inner) => chain_status(inner),
        OrbitError::BudgetExhausted { .. } => CcnStatus::BudgetExhausted,
        OrbitError::NotDelayedCycle | OrbitError::MissingCycleStates => CcnStatus::Infeasible,
    }
}

fn spectrum_status(err: &SpectrumError) -> CcnStatus {
    match err {
        SpectrumError::Chain(inner) => chain_status(inner),
        SpectrumError::Orbit(inner) => orbit_status(inner),
        SpectrumError::BudgetExceeded { .. } => CcnStatus::BudgetExhausted,
        SpectrumError::VerificationFailed(_) => CcnStatus::VerificationFailed,
        _ => CcnStatus::Infeasible,
    }
}

unsafe fn state_from_raw(
    params: &ChainParams,
    positions: *const u32,
    len: usize,
) -> Result<SystemState, CcnStatus> {
    if positions.is_null() {
        return Err(CcnStatus::NullPointer);
    }
    let slice = slice::from_raw_parts(positions, len);
    SystemState::new(slice.to_vec(), params).map_err(|e| chain_status(&e))
}

/// Allocate a parameter handle for `contours` contours of `2 * half_cells`
/// cells each and clusters of `cluster_len` particles.
///
/// # Safety
/// `out` must be a valid pointer to a `CcnParams*` slot.
#[no_mangle]
pub unsafe extern "C" fn ccn_params_new(
    contours: u32,
    half_cells: u32,
    cluster_len: u32,
    out: *mut *mut CcnParams,
) -> CcnStatus {
    if out.is_null() {
        return CcnStatus::NullPointer;
    }
    match ChainParams::new(contours, half_cells, cluster_len) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CcnParams { inner }));
            CcnStatus::Ok
        }
        Err(err) => chain_status(&err),
    }
}

/// # Safety
/// `params` must be null or a handle from [`ccn_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccn_params_free(params: *mut CcnParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Cells per contour (`2 * half_cells`). Returns 0 on a null handle.
///
/// # Safety
/// `params` must be null or a live handle from [`ccn_params_new`].
#[no_mangle]
pub unsafe extern "C" fn ccn_params_cells(params: *const CcnParams) -> u32 {
    match params.as_ref() {
        Some(p) => p.inner.cells(),
        None => 0,
    }
}

/// Test whether `positions` (length `len`, one leading cell per contour) is
/// an admissible state.
///
/// # Safety
/// `params` must be null or a live handle; `positions` must point to `len`
/// readable `uint32_t`s; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_is_admissible(
    params: *const CcnParams,
    positions: *const u32,
    len: usize,
    out: *mut bool,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if out.is_null() {
        return CcnStatus::NullPointer;
    }
    match state_from_raw(&params.inner, positions, len) {
        Ok(state) => {
            *out = params.inner.is_admissible(&state);
            CcnStatus::Ok
        }
        Err(status) => status,
    }
}

/// Advance one step. Writes `len` cells to `next_out`; when `moved_out` is
/// non-null it receives one flag per cluster.
///
/// # Safety
/// `positions` must point to `len` readable `uint32_t`s; `next_out` (and
/// `moved_out` when non-null) must have room for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn ccn_step(
    params: *const CcnParams,
    positions: *const u32,
    len: usize,
    next_out: *mut u32,
    moved_out: *mut bool,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if next_out.is_null() {
        return CcnStatus::NullPointer;
    }
    let state = match state_from_raw(&params.inner, positions, len) {
        Ok(state) => state,
        Err(status) => return status,
    };
    if !params.inner.is_admissible(&state) {
        return CcnStatus::Inadmissible;
    }
    let result = params.inner.step(&state);
    let next = slice::from_raw_parts_mut(next_out, len);
    next.copy_from_slice(result.next.positions());
    if !moved_out.is_null() {
        let moved = slice::from_raw_parts_mut(moved_out, len);
        moved.copy_from_slice(&result.moved);
    }
    CcnStatus::Ok
}

/// Run the trajectory from `positions` to its terminal cycle. `budget` caps
/// the searched prefix; 0 means no explicit cap (the state-space size is
/// used, which always suffices).
///
/// # Safety
/// `positions` must point to `len` readable `uint32_t`s; `out` must be a
/// valid pointer to a `CcnAnalysis*` slot.
#[no_mangle]
pub unsafe extern "C" fn ccn_find_cycle(
    params: *const CcnParams,
    positions: *const u32,
    len: usize,
    budget: u64,
    out: *mut *mut CcnAnalysis,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if out.is_null() {
        return CcnStatus::NullPointer;
    }
    let state = match state_from_raw(&params.inner, positions, len) {
        Ok(state) => state,
        Err(status) => return status,
    };
    let options = CycleOptions {
        budget: (budget > 0).then_some(budget),
        detection: Detection::FullIndex,
        retain_states: false,
    };
    match find_cycle(&state, &params.inner, &options) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CcnAnalysis { inner }));
            CcnStatus::Ok
        }
        Err(err) => orbit_status(&err),
    }
}

/// # Safety
/// `analysis` must be null or a handle from [`ccn_find_cycle`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_free(analysis: *mut CcnAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// # Safety
/// `analysis` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_transient(
    analysis: *const CcnAnalysis,
    out: *mut u64,
) -> CcnStatus {
    match (analysis.as_ref(), out.as_mut()) {
        (Some(a), Some(out)) => {
            *out = a.inner.transient_len;
            CcnStatus::Ok
        }
        _ => CcnStatus::NullPointer,
    }
}

/// # Safety
/// `analysis` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_period(
    analysis: *const CcnAnalysis,
    out: *mut u64,
) -> CcnStatus {
    match (analysis.as_ref(), out.as_mut()) {
        (Some(a), Some(out)) => {
            *out = a.inner.period;
            CcnStatus::Ok
        }
        _ => CcnStatus::NullPointer,
    }
}

/// Common long-run velocity as a reduced fraction.
///
/// # Safety
/// `analysis` must be null or a live handle; `numerator` and `denominator`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_velocity(
    analysis: *const CcnAnalysis,
    numerator: *mut u64,
    denominator: *mut u64,
) -> CcnStatus {
    let Some(a) = analysis.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if numerator.is_null() || denominator.is_null() {
        return CcnStatus::NullPointer;
    }
    *numerator = a.inner.velocity.numer();
    *denominator = a.inner.velocity.denom();
    CcnStatus::Ok
}

/// # Safety
/// `analysis` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_regime(
    analysis: *const CcnAnalysis,
    out: *mut CcnRegime,
) -> CcnStatus {
    match (analysis.as_ref(), out.as_mut()) {
        (Some(a), Some(out)) => {
            *out = match a.inner.regime {
                Regime::Collapse => CcnRegime::Collapse,
                Regime::FreeMovement => CcnRegime::FreeMovement,
                Regime::DelayedCycle => CcnRegime::DelayedCycle,
            };
            CcnStatus::Ok
        }
        _ => CcnStatus::NullPointer,
    }
}

/// # Safety
/// `analysis` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_delay_kind(
    analysis: *const CcnAnalysis,
    out: *mut CcnDelayKind,
) -> CcnStatus {
    match (analysis.as_ref(), out.as_mut()) {
        (Some(a), Some(out)) => {
            *out = match a.inner.delay_purity {
                DelayPurity::None => CcnDelayKind::None,
                DelayPurity::FirstOnly => CcnDelayKind::First,
                DelayPurity::SecondOnly => CcnDelayKind::Second,
                DelayPurity::Mixed => CcnDelayKind::Mixed,
            };
            CcnStatus::Ok
        }
        _ => CcnStatus::NullPointer,
    }
}

/// Cells advanced per cluster over one period. Two-call pattern.
///
/// # Safety
/// `moves_out` must be null or have room for `capacity` entries; `written`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_analysis_moves(
    analysis: *const CcnAnalysis,
    moves_out: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> CcnStatus {
    let Some(a) = analysis.as_ref() else {
        return CcnStatus::NullPointer;
    };
    let Some(written) = written.as_mut() else {
        return CcnStatus::NullPointer;
    };
    let moves = &a.inner.moves_per_cluster;
    *written = moves.len();
    if capacity < moves.len() {
        return CcnStatus::BufferTooSmall;
    }
    if moves_out.is_null() {
        return CcnStatus::NullPointer;
    }
    slice::from_raw_parts_mut(moves_out, moves.len()).copy_from_slice(moves);
    CcnStatus::Ok
}

/// Theoretical candidate velocities, descending, as parallel
/// numerator/denominator arrays. Two-call pattern.
///
/// # Safety
/// `numerators`/`denominators` must be null or have room for `capacity`
/// entries; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccn_candidate_velocities(
    params: *const CcnParams,
    numerators: *mut u64,
    denominators: *mut u64,
    capacity: usize,
    written: *mut usize,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    let Some(written) = written.as_mut() else {
        return CcnStatus::NullPointer;
    };
    let candidates = candidate_velocities(&params.inner);
    *written = candidates.len();
    if capacity < candidates.len() {
        return CcnStatus::BufferTooSmall;
    }
    if numerators.is_null() || denominators.is_null() {
        return CcnStatus::NullPointer;
    }
    let nums = slice::from_raw_parts_mut(numerators, candidates.len());
    let dens = slice::from_raw_parts_mut(denominators, candidates.len());
    for (i, c) in candidates.iter().enumerate() {
        nums[i] = c.numer();
        dens[i] = c.denom();
    }
    CcnStatus::Ok
}

/// Exhaustive velocity spectrum as a JSON document (schema_version 1).
/// `budget` 0 selects the default enumeration cap. Free the string with
/// `ccn_string_free`.
///
/// # Safety
/// `params` must be null or a live handle; `out` must be a valid pointer
/// to a `char*` slot.
#[no_mangle]
pub unsafe extern "C" fn ccn_spectrum_json(
    params: *const CcnParams,
    budget: u64,
    out: *mut *mut c_char,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if out.is_null() {
        return CcnStatus::NullPointer;
    }
    let budget = if budget == 0 { DEFAULT_BUDGET } else { budget };
    match empirical_spectrum(&params.inner, Exploration::Exhaustive { budget }) {
        Ok(report) => {
            let json = CString::new(report.to_json()).expect("json has no NUL");
            *out = json.into_raw();
            CcnStatus::Ok
        }
        Err(err) => spectrum_status(&err),
    }
}

/// Build the cycle state realizing the delay decomposition `delays`
/// (`turns` entries; `second_type` selects the mirrored family). Writes one
/// cell per contour to `state_out`.
///
/// # Safety
/// `delays` must point to `turns` readable `uint64_t`s; `state_out` must
/// have room for one `uint32_t` per contour.
#[no_mangle]
pub unsafe extern "C" fn ccn_construct(
    params: *const CcnParams,
    delays: *const u64,
    turns: usize,
    second_type: bool,
    state_out: *mut u32,
) -> CcnStatus {
    let Some(params) = params.as_ref() else {
        return CcnStatus::NullPointer;
    };
    if delays.is_null() || state_out.is_null() {
        return CcnStatus::NullPointer;
    }
    let delays = slice::from_raw_parts(delays, turns).to_vec();
    let decomposition = if second_type {
        DelayDecomposition::second(delays)
    } else {
        DelayDecomposition::first(delays)
    };
    match construct_cycle_state(&params.inner, &decomposition) {
        Ok(state) => {
            let out = slice::from_raw_parts_mut(state_out, params.inner.contours() as usize);
            out.copy_from_slice(state.positions());
            CcnStatus::Ok
        }
        Err(err) => spectrum_status(&err),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ccn_status_message(status: CcnStatus) -> *const c_char {
    let message = match status {
        CcnStatus::Ok => c"ok",
        CcnStatus::NullPointer => c"null pointer argument",
        CcnStatus::InvalidParams => c"invalid chain parameters",
        CcnStatus::InvalidState => c"malformed state vector",
        CcnStatus::Inadmissible => c"state is not admissible",
        CcnStatus::BudgetExhausted => c"exploration budget exhausted",
        CcnStatus::Infeasible => c"request is infeasible for these parameters",
        CcnStatus::VerificationFailed => c"constructed state failed verification",
        CcnStatus::BufferTooSmall => c"buffer too small",
    };
    message.as_ptr()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ccn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
