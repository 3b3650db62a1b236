//! Velocity spectra: the theoretical candidate set, empirical measurement
//! over initial states, and construction of cycles from delay decompositions.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, ChainParams, DelayType, SystemState};
use crate::orbit::{find_cycle, CycleAnalysis, CycleOptions, DelayPurity, OrbitError, Regime};
use crate::rational::Rational;

/// Default cap on exhaustive enumeration, in states.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectrumError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("state space of size {space} exceeds budget {budget}; use sampled exploration")]
    BudgetExceeded { space: u128, budget: u64 },
    #[error("sample count must be positive")]
    EmptySample,
    #[error("only {found} admissible states in {drawn} draws, wanted {wanted}")]
    SamplingStalled { drawn: u64, found: u64, wanted: u64 },
    #[error("delay decomposition needs at least one turn")]
    NoTurns,
    #[error("expected {turns} delay durations, got {got}")]
    WrongDelayCount { turns: u64, got: usize },
    #[error("delay duration {duration} exceeds bound {bound} for {delay_type:?}-type delays")]
    DelayTooLong {
        duration: u64,
        bound: u64,
        delay_type: DelayType,
    },
    #[error("infeasible decomposition: {turns} turns leave residual {residual}, delays sum to {got}")]
    InfeasibleDecomposition {
        turns: u64,
        residual: i128,
        got: u64,
    },
    #[error("construction requires cluster_len <= half_cells")]
    ClusterExceedsHalf,
    #[error("constructed state failed verification: {0}")]
    VerificationFailed(String),
}

/// `N * (m + l)`, the accounting period of Eq.-style delay bookkeeping.
pub fn accounting_period(params: &ChainParams) -> u64 {
    params.contours() as u64 * (params.half_cells() + params.cluster_len()) as u64
}

/// Velocities admitted by the turn/delay balance `N(m+l) = 2mr + sum(k)`
/// with `1 <= sum(k) <= r*l`, plus 1; `{0}` when the cluster cannot fit
/// through the nodes at all (`l > m`). Reduced, sorted descending.
pub fn candidate_velocities(params: &ChainParams) -> Vec<Rational> {
    let m = params.half_cells() as u64;
    let l = params.cluster_len() as u64;
    if l > m {
        return vec![Rational::ZERO];
    }
    let t = accounting_period(params);
    let cells = 2 * m;
    let mut out = vec![Rational::ONE];
    let mut turns = 1u64;
    while cells * turns < t {
        let residual = t - cells * turns;
        if residual <= turns * l {
            out.push(Rational::new(cells * turns, t));
        }
        turns += 1;
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Exploration {
    Exhaustive { budget: u64 },
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub velocity: Rational,
    pub basin_count: u64,
    /// Minimal-encoding state of the minimal cycle with this velocity.
    pub representative: SystemState,
    pub period: u64,
    pub regime: Regime,
    pub delay_purity: DelayPurity,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub params: ChainParams,
    pub exploration: Exploration,
    pub states_examined: u64,
    pub admissible_count: u64,
    /// Distinct velocities, descending.
    pub entries: Vec<SpectrumEntry>,
    pub candidates: Vec<Rational>,
}

/// Everything the exhaustive enumeration learned, cycles included.
pub struct ExhaustiveSurvey {
    pub report: SpectrumReport,
    /// Distinct terminal cycles, each analyzed from its minimal-encoding
    /// state (so `cycle_states` starts at the canonical state), ordered by
    /// that state's encoding.
    pub cycles: Vec<CycleAnalysis>,
}

/// Order states by their mixed-radix encoding without computing it.
fn encoding_cmp(a: &SystemState, b: &SystemState) -> Ordering {
    a.positions().iter().rev().cmp(b.positions().iter().rev())
}

fn canonical_cycle_state(analysis: &CycleAnalysis) -> &SystemState {
    analysis
        .cycle_states
        .as_ref()
        .expect("cycle states retained")
        .iter()
        .min_by(|a, b| encoding_cmp(a, b))
        .expect("cycle is nonempty")
}

const UNSET: u32 = u32::MAX;
const PENDING: u32 = u32::MAX - 1;
const INADMISSIBLE: u32 = u32::MAX - 2;

/// Classify every admissible state by its terminal cycle.
pub fn exhaustive_survey(
    params: &ChainParams,
    budget: u64,
) -> Result<ExhaustiveSurvey, SpectrumError> {
    let space = params.state_space_size().unwrap_or(u128::MAX);
    if space > budget as u128 {
        return Err(SpectrumError::BudgetExceeded { space, budget });
    }
    let size = usize::try_from(space).expect("state space exceeds address space");

    let mut cycle_of: Vec<u32> = vec![UNSET; size];
    let mut cycles: Vec<CycleAnalysis> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for start in 0..size {
        if cycle_of[start] != UNSET {
            continue;
        }
        let mut cur = params.decode(start as u128).unwrap();
        if !params.is_admissible(&cur) {
            cycle_of[start] = INADMISSIBLE;
            continue;
        }
        let mut cur_idx = start;
        path.clear();
        let assigned = loop {
            match cycle_of[cur_idx] {
                UNSET => {
                    cycle_of[cur_idx] = PENDING;
                    path.push(cur_idx);
                    cur = params.step(&cur).next;
                    cur_idx = params.encode(&cur) as usize;
                }
                PENDING => {
                    // trajectory closed on itself: the tail of `path` from
                    // the first occurrence of cur_idx is a new cycle
                    let pos = path.iter().position(|&i| i == cur_idx).unwrap();
                    let canonical_idx = *path[pos..].iter().min().unwrap();
                    let canonical = params.decode(canonical_idx as u128).unwrap();
                    let analysis = find_cycle(&canonical, params, &CycleOptions::default())?;
                    debug_assert_eq!(analysis.transient_len, 0);
                    debug_assert_eq!(analysis.period as usize, path.len() - pos);
                    let id = u32::try_from(cycles.len()).unwrap();
                    assert!(id < INADMISSIBLE, "too many distinct cycles");
                    cycles.push(analysis);
                    break id;
                }
                id => {
                    debug_assert_ne!(id, INADMISSIBLE);
                    break id;
                }
            }
        };
        for &i in &path {
            cycle_of[i] = assigned;
        }
    }

    let mut basin = vec![0u64; cycles.len()];
    let mut admissible_count = 0u64;
    for &label in &cycle_of {
        if label != INADMISSIBLE {
            basin[label as usize] += 1;
            admissible_count += 1;
        }
    }

    struct Agg {
        basin: u64,
        representative: usize,
    }
    let mut by_velocity: BTreeMap<Rational, Agg> = BTreeMap::new();
    for (i, analysis) in cycles.iter().enumerate() {
        let agg = by_velocity.entry(analysis.velocity).or_insert(Agg {
            basin: 0,
            representative: i,
        });
        agg.basin += basin[i];
        if encoding_cmp(
            canonical_cycle_state(analysis),
            canonical_cycle_state(&cycles[agg.representative]),
        ) == Ordering::Less
        {
            agg.representative = i;
        }
    }
    let entries: Vec<SpectrumEntry> = by_velocity
        .iter()
        .rev()
        .map(|(&velocity, agg)| {
            let rep = &cycles[agg.representative];
            SpectrumEntry {
                velocity,
                basin_count: agg.basin,
                representative: canonical_cycle_state(rep).clone(),
                period: rep.period,
                regime: rep.regime,
                delay_purity: rep.delay_purity,
            }
        })
        .collect();

    cycles.sort_by(|a, b| encoding_cmp(canonical_cycle_state(a), canonical_cycle_state(b)));

    Ok(ExhaustiveSurvey {
        report: SpectrumReport {
            params: *params,
            exploration: Exploration::Exhaustive { budget },
            states_examined: size as u64,
            admissible_count,
            entries,
            candidates: candidate_velocities(params),
        },
        cycles,
    })
}

/// Measure the velocity spectrum over admissible initial states.
pub fn empirical_spectrum(
    params: &ChainParams,
    exploration: Exploration,
) -> Result<SpectrumReport, SpectrumError> {
    match exploration {
        Exploration::Exhaustive { budget } => Ok(exhaustive_survey(params, budget)?.report),
        Exploration::Sampled { count, seed } => sampled_spectrum(params, count, seed),
    }
}

/// Spectrum from `count` admissible states drawn uniformly with a seeded
/// generator. Deterministic for a fixed `(params, count, seed)` triple.
pub fn sampled_spectrum(
    params: &ChainParams,
    count: u64,
    seed: u64,
) -> Result<SpectrumReport, SpectrumError> {
    if count == 0 {
        return Err(SpectrumError::EmptySample);
    }
    struct Agg {
        basin: u64,
        representative: SystemState,
        period: u64,
        regime: Regime,
        delay_purity: DelayPurity,
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.contours() as usize;
    let cells = params.cells();
    let mut states_examined = 0u64;
    let mut admissible_count = 0u64;
    let mut by_velocity: BTreeMap<Rational, Agg> = BTreeMap::new();
    let max_draws = count.saturating_mul(10_000);
    while admissible_count < count {
        if states_examined == max_draws {
            return Err(SpectrumError::SamplingStalled {
                drawn: states_examined,
                found: admissible_count,
                wanted: count,
            });
        }
        let state =
            SystemState::from_raw((0..n).map(|_| rng.gen_range(0..cells)).collect());
        states_examined += 1;
        if !params.is_admissible(&state) {
            continue;
        }
        admissible_count += 1;
        let analysis = find_cycle(&state, params, &CycleOptions::default())?;
        let canonical = canonical_cycle_state(&analysis).clone();
        let agg = by_velocity
            .entry(analysis.velocity)
            .or_insert_with(|| Agg {
                basin: 0,
                representative: canonical.clone(),
                period: analysis.period,
                regime: analysis.regime,
                delay_purity: analysis.delay_purity,
            });
        agg.basin += 1;
        if encoding_cmp(&canonical, &agg.representative) == Ordering::Less {
            agg.representative = canonical;
            agg.period = analysis.period;
            agg.regime = analysis.regime;
            agg.delay_purity = analysis.delay_purity;
        }
    }
    let entries: Vec<SpectrumEntry> = by_velocity
        .iter()
        .rev()
        .map(|(&velocity, agg)| SpectrumEntry {
            velocity,
            basin_count: agg.basin,
            representative: agg.representative.clone(),
            period: agg.period,
            regime: agg.regime,
            delay_purity: agg.delay_purity,
        })
        .collect();
    Ok(SpectrumReport {
        params: *params,
        exploration: Exploration::Sampled { count, seed },
        states_examined,
        admissible_count,
        entries,
        candidates: candidate_velocities(params),
    })
}

/// `r` turns around the contour per accounting period, delayed `k_i` steps
/// on turn `i`, all delays of one type.
#[derive(Clone, Debug)]
pub struct DelayDecomposition {
    pub turns: u64,
    pub delays: Vec<u64>,
    pub delay_type: DelayType,
}

impl DelayDecomposition {
    pub fn first(delays: Vec<u64>) -> DelayDecomposition {
        DelayDecomposition {
            turns: delays.len() as u64,
            delays,
            delay_type: DelayType::First,
        }
    }

    pub fn second(delays: Vec<u64>) -> DelayDecomposition {
        DelayDecomposition {
            turns: delays.len() as u64,
            delays,
            delay_type: DelayType::Second,
        }
    }

    pub fn total_delay(&self) -> u64 {
        self.delays.iter().sum()
    }

    /// Turn/delay balance: `N(m+l) = 2m*turns + sum(delays)`, each delay at
    /// most `l` (first type) or `l - 1` (second type).
    pub fn validate(&self, params: &ChainParams) -> Result<(), SpectrumError> {
        if self.turns == 0 {
            return Err(SpectrumError::NoTurns);
        }
        if self.delays.len() as u64 != self.turns {
            return Err(SpectrumError::WrongDelayCount {
                turns: self.turns,
                got: self.delays.len(),
            });
        }
        let bound = match self.delay_type {
            DelayType::First => params.cluster_len() as u64,
            DelayType::Second => params.cluster_len() as u64 - 1,
        };
        for &duration in &self.delays {
            if duration > bound {
                return Err(SpectrumError::DelayTooLong {
                    duration,
                    bound,
                    delay_type: self.delay_type,
                });
            }
        }
        let t = accounting_period(params) as i128;
        let residual = t - (params.cells() as u64 * self.turns) as i128;
        let got = self.total_delay();
        if residual < 0 || got as i128 != residual {
            return Err(SpectrumError::InfeasibleDecomposition {
                turns: self.turns,
                residual,
                got,
            });
        }
        Ok(())
    }

    /// `1 - sum(delays) / N(m+l)`.
    pub fn velocity(&self, params: &ChainParams) -> Rational {
        let t = accounting_period(params);
        Rational::new(t - self.total_delay(), t)
    }
}

/// Build a state on a cycle realizing `decomposition`: cluster 0 follows the
/// schedule that dwells `k_i + 1` steps at the waiting cell on turn `i`
/// (cell `m` for first-type delays, cell 0 for second-type) and advances
/// elsewhere; cluster `j` runs the same schedule `j * (m + l)` steps behind.
/// Second-type states are additionally mirrored. The result is checked by
/// simulation before being returned.
pub fn construct_cycle_state(
    params: &ChainParams,
    decomposition: &DelayDecomposition,
) -> Result<SystemState, SpectrumError> {
    let state = schedule_state(params, decomposition)?;
    verify_construction(params, decomposition, &state)?;
    Ok(state)
}

/// The schedule-derived state before simulation checks it.
pub(crate) fn schedule_state(
    params: &ChainParams,
    decomposition: &DelayDecomposition,
) -> Result<SystemState, SpectrumError> {
    if params.cluster_len() > params.half_cells() {
        return Err(SpectrumError::ClusterExceedsHalf);
    }
    decomposition.validate(params)?;
    let t = accounting_period(params);
    let cells = params.cells();
    let wait_cell = match decomposition.delay_type {
        DelayType::First => params.half_cells(),
        DelayType::Second => 0,
    };
    let mut schedule: Vec<u32> = Vec::with_capacity(t as usize);
    for &k in &decomposition.delays {
        for cell in 0..cells {
            schedule.push(cell);
            if cell == wait_cell {
                schedule.extend(std::iter::repeat_n(cell, k as usize));
            }
        }
    }
    debug_assert_eq!(schedule.len() as u64, t);
    let shift = (params.half_cells() + params.cluster_len()) as u64;
    let positions: Vec<u32> = (0..params.contours() as u64)
        .map(|j| schedule[((t - (j * shift) % t) % t) as usize])
        .collect();
    let state = SystemState::from_raw(positions);
    Ok(match decomposition.delay_type {
        DelayType::First => state,
        DelayType::Second => state.mirrored(),
    })
}

fn verify_construction(
    params: &ChainParams,
    decomposition: &DelayDecomposition,
    state: &SystemState,
) -> Result<(), SpectrumError> {
    if !params.is_admissible(state) {
        return Err(SpectrumError::VerificationFailed(format!(
            "state ({state}) is inadmissible"
        )));
    }
    let analysis = find_cycle(state, params, &CycleOptions::default())?;
    if analysis.transient_len != 0 {
        return Err(SpectrumError::VerificationFailed(format!(
            "state ({state}) is not on its cycle (transient {})",
            analysis.transient_len
        )));
    }
    let want = decomposition.velocity(params);
    if analysis.velocity != want {
        return Err(SpectrumError::VerificationFailed(format!(
            "state ({state}) has velocity {}, wanted {}",
            analysis.velocity, want
        )));
    }
    let want_purity = if decomposition.total_delay() == 0 {
        DelayPurity::None
    } else {
        match decomposition.delay_type {
            DelayType::First => DelayPurity::FirstOnly,
            DelayType::Second => DelayPurity::SecondOnly,
        }
    };
    if analysis.delay_purity != want_purity {
        return Err(SpectrumError::VerificationFailed(format!(
            "state ({state}) has delay purity {:?}, wanted {:?}",
            analysis.delay_purity, want_purity
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ExplorationDoc {
    mode: &'static str,
    budget_or_count: u64,
    seed: Option<u64>,
    generator: Option<&'static str>,
}

#[derive(Serialize)]
struct EntryDoc<'a> {
    velocity: Rational,
    basin_count: u64,
    representative: &'a SystemState,
    period: u64,
    regime: Regime,
    delay_type: DelayPurity,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema_version: u32,
    params: &'a ChainParams,
    exploration: ExplorationDoc,
    states_examined: u64,
    admissible_count: u64,
    spectrum: Vec<EntryDoc<'a>>,
    candidates: &'a [Rational],
}

pub(crate) fn regime_str(regime: Regime) -> &'static str {
    match regime {
        Regime::FreeMovement => "free_movement",
        Regime::Collapse => "collapse",
        Regime::DelayedCycle => "delayed_cycle",
    }
}

pub(crate) fn purity_str(purity: DelayPurity) -> &'static str {
    match purity {
        DelayPurity::None => "none",
        DelayPurity::FirstOnly => "first",
        DelayPurity::SecondOnly => "second",
        DelayPurity::Mixed => "mixed",
    }
}

impl SpectrumReport {
    fn exploration_doc(&self) -> ExplorationDoc {
        match self.exploration {
            Exploration::Exhaustive { budget } => ExplorationDoc {
                mode: "exhaustive",
                budget_or_count: budget,
                seed: None,
                generator: None,
            },
            Exploration::Sampled { count, seed } => ExplorationDoc {
                mode: "sampled",
                budget_or_count: count,
                seed: Some(seed),
                generator: Some("chacha8"),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            schema_version: 1,
            params: &self.params,
            exploration: self.exploration_doc(),
            states_examined: self.states_examined,
            admissible_count: self.admissible_count,
            spectrum: self
                .entries
                .iter()
                .map(|e| EntryDoc {
                    velocity: e.velocity,
                    basin_count: e.basin_count,
                    representative: &e.representative,
                    period: e.period,
                    regime: e.regime,
                    delay_type: e.delay_purity,
                })
                .collect(),
            candidates: &self.candidates,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,m,l,velocity,basin_count,period,regime\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.params.contours(),
                self.params.half_cells(),
                self.params.cluster_len(),
                e.velocity,
                e.basin_count,
                e.period,
                regime_str(e.regime)
            )
            .unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "spectrum N={} m={} l={}\n",
            self.params.contours(),
            self.params.half_cells(),
            self.params.cluster_len()
        );
        match self.exploration {
            Exploration::Exhaustive { budget } => {
                writeln!(out, "exploration: exhaustive, budget {budget}").unwrap()
            }
            Exploration::Sampled { count, seed } => writeln!(
                out,
                "exploration: sampled, count {count}, seed {seed}, generator chacha8"
            )
            .unwrap(),
        }
        writeln!(out, "states examined: {}", self.states_examined).unwrap();
        writeln!(out, "admissible: {}", self.admissible_count).unwrap();
        writeln!(
            out,
            "{:<10} {:>12} {:>8}  {:<14} {:<6}  representative",
            "velocity", "basin_count", "period", "regime", "delay"
        )
        .unwrap();
        for e in &self.entries {
            writeln!(
                out,
                "{:<10} {:>12} {:>8}  {:<14} {:<6}  ({})",
                e.velocity.to_string(),
                e.basin_count,
                e.period,
                regime_str(e.regime),
                purity_str(e.delay_purity),
                e.representative
            )
            .unwrap();
        }
        let candidates: Vec<String> = self.candidates.iter().map(|c| c.to_string()).collect();
        writeln!(out, "candidates: {}", candidates.join(", ")).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, m: u32, l: u32) -> ChainParams {
        ChainParams::new(n, m, l).unwrap()
    }

    fn velocities_of(report: &SpectrumReport) -> Vec<Rational> {
        report.entries.iter().map(|e| e.velocity).collect()
    }

    #[test]
    fn candidates_match_feasibility_scan() {
        assert_eq!(
            candidate_velocities(&params(3, 5, 2)),
            vec![Rational::ONE, Rational::new(20, 21)]
        );
        assert_eq!(
            candidate_velocities(&params(3, 1, 1)),
            vec![Rational::ONE, Rational::new(2, 3)]
        );
        assert_eq!(candidate_velocities(&params(3, 4, 1)), vec![Rational::ONE]);
        assert_eq!(candidate_velocities(&params(3, 2, 3)), vec![Rational::ZERO]);
        assert_eq!(
            candidate_velocities(&params(6, 1, 1)),
            vec![
                Rational::ONE,
                Rational::new(5, 6),
                Rational::new(2, 3)
            ]
        );
    }

    #[test]
    fn exhaustive_spectrum_example_1() {
        let p = params(3, 5, 2);
        let report = empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
        assert_eq!(report.states_examined, 1000);
        // three node constraints, each forbidding one (x_i, x_{i+1}) pair
        assert_eq!(report.admissible_count, 970);
        assert_eq!(
            velocities_of(&report),
            vec![Rational::ONE, Rational::new(20, 21)]
        );
        let basins: u64 = report.entries.iter().map(|e| e.basin_count).sum();
        assert_eq!(basins, report.admissible_count);
        let delayed = &report.entries[1];
        assert_eq!(delayed.period, 21);
        assert_eq!(delayed.regime, Regime::DelayedCycle);
    }

    #[test]
    fn exhaustive_spectrum_collapse() {
        let p = params(3, 2, 3);
        let report = empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
        assert_eq!(velocities_of(&report), vec![Rational::ZERO]);
        assert_eq!(report.entries[0].regime, Regime::Collapse);
        assert_eq!(report.candidates, vec![Rational::ZERO]);
    }

    #[test]
    fn exhaustive_spectrum_binary_chain() {
        let p = params(3, 1, 1);
        let report = empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
        assert_eq!(report.states_examined, 8);
        assert_eq!(report.admissible_count, 8);
        assert_eq!(
            velocities_of(&report),
            vec![Rational::ONE, Rational::new(2, 3)]
        );
        let rep = &report.entries[1].representative;
        let mut sorted = rep.positions().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 1]);
    }

    #[test]
    fn exhaustive_budget_is_enforced() {
        let p = params(3, 5, 2);
        assert_eq!(
            empirical_spectrum(&p, Exploration::Exhaustive { budget: 999 }).unwrap_err(),
            SpectrumError::BudgetExceeded {
                space: 1000,
                budget: 999
            }
        );
    }

    #[test]
    fn survey_cycle_count_matches_entries() {
        let survey = exhaustive_survey(&params(3, 1, 1), 1_000_000).unwrap();
        // the free cycle {(0,0,0),(1,1,1)} and the one cycle through the
        // rotations of (0,1,1)
        assert_eq!(survey.cycles.len(), 2);
        let mut velocities: Vec<Rational> =
            survey.cycles.iter().map(|c| c.velocity).collect();
        velocities.sort();
        velocities.dedup();
        assert_eq!(velocities, vec![Rational::new(2, 3), Rational::ONE]);
    }

    #[test]
    fn independent_enumeration_agrees() {
        // brute force with none of the survey's bookkeeping
        use std::collections::BTreeSet;
        use std::collections::HashMap;
        let p = params(2, 2, 1);
        let mut seen: BTreeSet<Rational> = BTreeSet::new();
        let mut admissible = 0u64;
        for index in 0..p.state_space_size().unwrap() {
            let s = p.decode(index).unwrap();
            if !p.is_admissible(&s) {
                continue;
            }
            admissible += 1;
            let mut visited: HashMap<SystemState, u64> = HashMap::new();
            let mut cur = s;
            let mut time = 0u64;
            let (start, period) = loop {
                if let Some(&t0) = visited.get(&cur) {
                    break (t0, time - t0);
                }
                visited.insert(cur.clone(), time);
                cur = p.step(&cur).next;
                time += 1;
            };
            let _ = start;
            let mut moves = 0u64;
            for _ in 0..period {
                let r = p.step(&cur);
                if r.moved[0] {
                    moves += 1;
                }
                cur = r.next;
            }
            seen.insert(Rational::new(moves, period));
        }
        let report = empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
        assert_eq!(report.admissible_count, admissible);
        let mut expected: Vec<Rational> = seen.into_iter().collect();
        expected.reverse();
        assert_eq!(velocities_of(&report), expected);
    }

    #[test]
    fn sampled_spectrum_is_subset_and_deterministic() {
        let p = params(3, 5, 2);
        let sampled = empirical_spectrum(
            &p,
            Exploration::Sampled {
                count: 200,
                seed: 42,
            },
        )
        .unwrap();
        let again = empirical_spectrum(
            &p,
            Exploration::Sampled {
                count: 200,
                seed: 42,
            },
        )
        .unwrap();
        assert_eq!(sampled.to_json(), again.to_json());
        assert_eq!(sampled.admissible_count, 200);
        assert!(sampled.states_examined >= 200);
        let exhaustive =
            empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
        let full: Vec<Rational> = velocities_of(&exhaustive);
        for v in velocities_of(&sampled) {
            assert!(full.contains(&v));
        }
        let basins: u64 = sampled.entries.iter().map(|e| e.basin_count).sum();
        assert_eq!(basins, sampled.admissible_count);
    }

    #[test]
    fn sampled_spectrum_rejects_zero_count() {
        assert_eq!(
            empirical_spectrum(&params(3, 5, 2), Exploration::Sampled { count: 0, seed: 1 })
                .unwrap_err(),
            SpectrumError::EmptySample
        );
    }

    #[test]
    fn construct_example_1() {
        let p = params(3, 5, 2);
        let d = DelayDecomposition::first(vec![0, 1]);
        let state = construct_cycle_state(&p, &d).unwrap();
        let analysis = find_cycle(&state, &p, &CycleOptions::default()).unwrap();
        assert_eq!(analysis.period, 21);
        assert_eq!(analysis.velocity, Rational::new(20, 21));
        assert_eq!(analysis.delay_purity, DelayPurity::FirstOnly);
        let target = SystemState::new(vec![1, 5, 8], &p).unwrap();
        assert!(analysis.cycle_states.unwrap().contains(&target));
    }

    #[test]
    fn construct_binary_chain() {
        let p = params(3, 1, 1);
        let state = construct_cycle_state(&p, &DelayDecomposition::first(vec![1, 1])).unwrap();
        let mut sorted = state.positions().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 1]);
        let analysis = find_cycle(&state, &p, &CycleOptions::default()).unwrap();
        assert_eq!(analysis.velocity, Rational::new(2, 3));
        assert_eq!(analysis.period, 3);
    }

    #[test]
    fn construct_free_movement_decomposition() {
        let p = params(3, 1, 1);
        let state = construct_cycle_state(&p, &DelayDecomposition::first(vec![0, 0, 0])).unwrap();
        let analysis = find_cycle(&state, &p, &CycleOptions::default()).unwrap();
        assert_eq!(analysis.velocity, Rational::ONE);
        assert_eq!(analysis.delay_purity, DelayPurity::None);
    }

    #[test]
    fn construct_second_type() {
        let p = params(3, 5, 2);
        let d = DelayDecomposition::second(vec![0, 1]);
        let state = construct_cycle_state(&p, &d).unwrap();
        let analysis = find_cycle(&state, &p, &CycleOptions::default()).unwrap();
        assert_eq!(analysis.velocity, Rational::new(20, 21));
        assert_eq!(analysis.delay_purity, DelayPurity::SecondOnly);
        let target = SystemState::new(vec![8, 5, 1], &p).unwrap();
        assert!(analysis.cycle_states.unwrap().contains(&target));
    }

    #[test]
    fn construct_rejects_infeasible_decompositions() {
        let p = params(3, 5, 2);
        assert_eq!(
            construct_cycle_state(&p, &DelayDecomposition::first(vec![0, 0])).unwrap_err(),
            SpectrumError::InfeasibleDecomposition {
                turns: 2,
                residual: 1,
                got: 0
            }
        );
        assert_eq!(
            construct_cycle_state(&p, &DelayDecomposition::first(vec![])).unwrap_err(),
            SpectrumError::NoTurns
        );
        assert_eq!(
            construct_cycle_state(&p, &DelayDecomposition::first(vec![3])).unwrap_err(),
            SpectrumError::DelayTooLong {
                duration: 3,
                bound: 2,
                delay_type: DelayType::First
            }
        );
        assert_eq!(
            construct_cycle_state(&p, &DelayDecomposition::second(vec![2, 2])).unwrap_err(),
            SpectrumError::DelayTooLong {
                duration: 2,
                bound: 1,
                delay_type: DelayType::Second
            }
        );
        assert_eq!(
            construct_cycle_state(&params(3, 2, 3), &DelayDecomposition::first(vec![0]))
                .unwrap_err(),
            SpectrumError::ClusterExceedsHalf
        );
    }

    #[test]
    fn mirror_examples() {
        let p = params(3, 5, 2);
        let s = SystemState::new(vec![1, 5, 8], &p).unwrap();
        assert_eq!(s.mirrored().positions(), &[8, 5, 1]);
        let z = SystemState::new(vec![0, 0, 0], &p).unwrap();
        assert_eq!(z.mirrored(), z);
    }

    #[test]
    fn report_serialization_shapes() {
        let p = params(3, 1, 1);
        let report = empirical_spectrum(&p, Exploration::Exhaustive { budget: 100 }).unwrap();
        let json = report.to_json();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["params"]["contours"], 3);
        assert_eq!(doc["exploration"]["mode"], "exhaustive");
        assert_eq!(doc["spectrum"][0]["velocity"], "1/1");
        assert_eq!(doc["spectrum"][1]["velocity"], "2/3");
        assert_eq!(doc["candidates"][1], "2/3");
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "N,m,l,velocity,basin_count,period,regime"
        );
        assert!(lines.next().unwrap().starts_with("3,1,1,1/1,"));
        assert!(lines.next().unwrap().starts_with("3,1,1,2/3,"));
        let text = report.to_text();
        assert!(text.contains("spectrum N=3 m=1 l=1"));
        assert!(text.contains("candidates: 1/1, 2/3"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_params() -> impl Strategy<Value = ChainParams> {
            (2u32..=5, 1u32..=4).prop_flat_map(|(n, m)| {
                (1u32..=2 * m - 1).prop_map(move |l| ChainParams::new(n, m, l).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn candidates_are_sorted_reduced_and_bounded(p in arb_params()) {
                let cs = candidate_velocities(&p);
                prop_assert!(!cs.is_empty());
                for w in cs.windows(2) {
                    prop_assert!(w[0] > w[1]);
                }
                if p.cluster_len() > p.half_cells() {
                    prop_assert_eq!(cs, vec![Rational::ZERO]);
                } else {
                    prop_assert_eq!(cs[0], Rational::ONE);
                    for c in &cs[1..] {
                        prop_assert!(!c.is_zero());
                        prop_assert!(*c < Rational::ONE);
                    }
                }
            }

            #[test]
            fn spectrum_invariants(p in arb_params()) {
                let report =
                    empirical_spectrum(&p, Exploration::Exhaustive { budget: 1_000_000 }).unwrap();
                let vs: Vec<Rational> = report.entries.iter().map(|e| e.velocity).collect();
                for w in vs.windows(2) {
                    prop_assert!(w[0] > w[1]);
                }
                let basins: u64 = report.entries.iter().map(|e| e.basin_count).sum();
                prop_assert_eq!(basins, report.admissible_count);
                for e in &report.entries {
                    if !e.velocity.is_zero() && !e.velocity.is_one() {
                        prop_assert!(report.candidates.contains(&e.velocity));
                    }
                    // representatives sit on their own cycle
                    let analysis =
                        find_cycle(&e.representative, &p, &CycleOptions::default()).unwrap();
                    prop_assert_eq!(analysis.transient_len, 0);
                    prop_assert_eq!(analysis.period, e.period);
                    prop_assert_eq!(analysis.velocity, e.velocity);
                }
            }
        }
    }
}
