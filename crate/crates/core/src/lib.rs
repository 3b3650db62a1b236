//! Discrete closed chain of contours with cluster movement.
//!
//! A chain is `N` contours of `2m` cells arranged in a ring, each carrying a
//! cluster of `l` particles that advances one cell per step unless it
//! competes with a neighbour at one of the shared nodes. This crate provides
//! the exact step map, limit-cycle analysis, velocity spectra over initial
//! states, cycle construction from delay decompositions, and a brute-force
//! harness that checks the structural claims about the model on parameter
//! grids.

pub mod chain;
pub mod cli;
pub mod harness;
pub mod orbit;
pub mod rational;
pub mod spectrum;

pub use chain::{ChainError, ChainParams, DelayEvent, DelayType, StepResult, SystemState};
pub use orbit::{
    find_cycle, trace, velocities, verify_delay_structure, CycleAnalysis, CycleOptions,
    DelayPurity, Detection, OrbitError, Regime, StructureReport, TraceRow, VelocityReport,
};
pub use rational::Rational;
pub use spectrum::{
    accounting_period, candidate_velocities, construct_cycle_state, empirical_spectrum,
    exhaustive_survey, sampled_spectrum, DelayDecomposition, ExhaustiveSurvey, Exploration,
    SpectrumEntry, SpectrumError, SpectrumReport, DEFAULT_BUDGET,
};
pub use harness::{
    check_collapse, check_cycle_structure, check_free_movement_thresholds,
    check_spectrum_claims, run_suite, Bound, ClaimId, ClaimReport, GridSpec, HarnessError,
    PointVerdict, SuiteReport, Verdict,
};
