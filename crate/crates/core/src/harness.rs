//! Brute-force verification of the structural claims over parameter grids.
//!
//! Each claim is checked exhaustively at every grid point whose state space
//! fits the budget; a violation always carries a replayable witness state.
//! Claims the source material leaves at boundary or unproven strength are
//! recorded as findings instead of assertions.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, ChainParams, SystemState};
use crate::orbit::{velocities, verify_delay_structure, CycleAnalysis, Regime};
use crate::rational::Rational;
use crate::spectrum::{
    accounting_period, construct_cycle_state, exhaustive_survey, schedule_state,
    DelayDecomposition, ExhaustiveSurvey, SpectrumError, DEFAULT_BUDGET,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("malformed grid `{expr}`: {reason}")]
    BadGrid { expr: String, reason: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Inclusive bound of the cluster-length range, optionally relative to `m`
/// (`1`, `m`, `2m-1`, ...).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bound {
    m_coef: i64,
    offset: i64,
}

impl Bound {
    pub const fn constant(value: i64) -> Bound {
        Bound {
            m_coef: 0,
            offset: value,
        }
    }

    pub const fn linear(m_coef: i64, offset: i64) -> Bound {
        Bound { m_coef, offset }
    }

    fn eval(&self, m: u32) -> i64 {
        self.m_coef * m as i64 + self.offset
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.m_coef, self.offset) {
            (0, c) => write!(f, "{c}"),
            (1, 0) => write!(f, "m"),
            (a, 0) => write!(f, "{a}m"),
            (1, c) if c > 0 => write!(f, "m+{c}"),
            (1, c) => write!(f, "m{c}"),
            (a, c) if c > 0 => write!(f, "{a}m+{c}"),
            (a, c) => write!(f, "{a}m{c}"),
        }
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Bound, String> {
        let s = s.trim();
        let Some(m_at) = s.find('m') else {
            let value = s.parse().map_err(|_| format!("bad bound `{s}`"))?;
            return Ok(Bound::constant(value));
        };
        let (coef_part, rest) = s.split_at(m_at);
        let rest = &rest[1..];
        let m_coef = match coef_part.trim() {
            "" => 1,
            c => c.parse().map_err(|_| format!("bad coefficient in `{s}`"))?,
        };
        let offset = match rest.trim() {
            "" => 0,
            c => c
                .strip_prefix('+')
                .unwrap_or(c)
                .parse()
                .map_err(|_| format!("bad offset in `{s}`"))?,
        };
        Ok(Bound { m_coef, offset })
    }
}

/// Inclusive parameter ranges plus the per-point state budget.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GridSpec {
    pub contours: (u32, u32),
    pub half_cells: (u32, u32),
    pub cluster_len: (Bound, Bound),
    pub budget: u64,
}

impl Default for GridSpec {
    fn default() -> GridSpec {
        GridSpec {
            contours: (2, 5),
            half_cells: (1, 4),
            cluster_len: (Bound::constant(1), Bound::linear(2, -1)),
            budget: DEFAULT_BUDGET,
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={}..{},m={}..{},l={}..{}",
            self.contours.0,
            self.contours.1,
            self.half_cells.0,
            self.half_cells.1,
            self.cluster_len.0,
            self.cluster_len.1
        )
    }
}

impl GridSpec {
    /// Parse `N=2..5,m=1..4,l=1..2m-1`; single values stand for one-point
    /// ranges, and the `l` bounds may mention `m`.
    pub fn parse(expr: &str, budget: u64) -> Result<GridSpec, HarnessError> {
        let bad = |reason: String| HarnessError::BadGrid {
            expr: expr.to_string(),
            reason,
        };
        let mut contours = None;
        let mut half_cells = None;
        let mut cluster_len = None;
        for part in expr.split(',') {
            let part = part.trim();
            let (key, range) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=range, got `{part}`")))?;
            let (lo, hi) = match range.split_once("..") {
                Some((lo, hi)) => (lo, hi),
                None => (range, range),
            };
            match key.trim() {
                "N" => {
                    contours = Some((
                        parse_u32(lo).map_err(&bad)?,
                        parse_u32(hi).map_err(&bad)?,
                    ))
                }
                "m" => {
                    half_cells = Some((
                        parse_u32(lo).map_err(&bad)?,
                        parse_u32(hi).map_err(&bad)?,
                    ))
                }
                "l" => {
                    cluster_len = Some((
                        lo.parse::<Bound>().map_err(&bad)?,
                        hi.parse::<Bound>().map_err(&bad)?,
                    ))
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        Ok(GridSpec {
            contours: contours.ok_or_else(|| bad("missing N range".into()))?,
            half_cells: half_cells.ok_or_else(|| bad("missing m range".into()))?,
            cluster_len: cluster_len.ok_or_else(|| bad("missing l range".into()))?,
            budget,
        })
    }

    /// All grid points in canonical (N, m, l) order. Empty ranges yield an
    /// empty grid; a concrete point violating the chain invariants is an
    /// error.
    pub fn points(&self) -> Result<Vec<ChainParams>, HarnessError> {
        let mut out = Vec::new();
        for n in self.contours.0..=self.contours.1 {
            for m in self.half_cells.0..=self.half_cells.1 {
                let lo = self.cluster_len.0.eval(m);
                let hi = self.cluster_len.1.eval(m);
                for l in lo..=hi {
                    let l = u32::try_from(l).map_err(|_| HarnessError::BadGrid {
                        expr: self.to_string(),
                        reason: format!("cluster length {l} out of range"),
                    })?;
                    out.push(ChainParams::new(n, m, l)?);
                }
            }
        }
        Ok(out)
    }
}

fn parse_u32(s: &str) -> Result<u32, String> {
    s.trim().parse().map_err(|_| format!("bad integer `{s}`"))
}

/// Identifiers of the checked claims, in report order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ClaimId {
    /// Collapse iff the cluster is longer than half the contour.
    Collapse,
    /// Chained delay starts spaced `m + l`; delayed periods divide `N(m+l)`.
    ChainTiming,
    /// A delayed cycle carries one delay type only.
    Purity,
    /// A velocity-1 cycle exists iff `l <= m`.
    FreeExistence,
    /// Delayed velocities lie in `[2/3, 1)`, strictly above `2/3` for `l < m`.
    VelocityRange,
    /// At most `floor(N/3)` sub-unit velocities.
    CountBound,
    /// Strict free-movement thresholds; boundary equality reported only.
    Thresholds,
    /// Gap `m - l` behind the delayed cluster when a first-type run ends.
    FirstDelayGap,
    /// Gap `m + l` ahead of the delayed cluster when a second-type run ends.
    SecondDelayGap,
    /// All clusters share one velocity on every cycle.
    Uniformity,
    /// Sub-unit velocities all come from the turn/delay balance.
    CandidateSoundness,
    /// Every feasible first-type decomposition is realized by construction.
    ConstructiveSufficiency,
}

impl ClaimId {
    pub const ALL: [ClaimId; 12] = [
        ClaimId::Collapse,
        ClaimId::ChainTiming,
        ClaimId::Purity,
        ClaimId::FreeExistence,
        ClaimId::VelocityRange,
        ClaimId::CountBound,
        ClaimId::Thresholds,
        ClaimId::FirstDelayGap,
        ClaimId::SecondDelayGap,
        ClaimId::Uniformity,
        ClaimId::CandidateSoundness,
        ClaimId::ConstructiveSufficiency,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClaimId::Collapse => "T1",
            ClaimId::ChainTiming => "T3",
            ClaimId::Purity => "T6",
            ClaimId::FreeExistence => "T7",
            ClaimId::VelocityRange => "T8",
            ClaimId::CountBound => "T9",
            ClaimId::Thresholds => "T10/11/12",
            ClaimId::FirstDelayGap => "L1",
            ClaimId::SecondDelayGap => "L2",
            ClaimId::Uniformity => "uniformity",
            ClaimId::CandidateSoundness => "Eq4-soundness",
            ClaimId::ConstructiveSufficiency => "S6-sufficiency",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated { witness: SystemState, detail: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }
}

#[derive(Clone, Debug)]
pub struct PointVerdict {
    pub params: ChainParams,
    pub verdict: Verdict,
    pub findings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub verdicts: Vec<PointVerdict>,
}

impl ClaimReport {
    pub fn all_hold(&self) -> bool {
        !self.verdicts.iter().any(|v| v.verdict.is_violated())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub grid: GridSpec,
    pub points: usize,
    pub claims: Vec<ClaimReport>,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.claims.iter().all(ClaimReport::all_hold)
    }
}

struct Outcome {
    verdict: Verdict,
    findings: Vec<String>,
}

impl Outcome {
    fn holds() -> Outcome {
        Outcome {
            verdict: Verdict::Holds,
            findings: Vec::new(),
        }
    }

    fn violated(witness: &SystemState, detail: String) -> Outcome {
        Outcome {
            verdict: Verdict::Violated {
                witness: witness.clone(),
                detail,
            },
            findings: Vec::new(),
        }
    }

    fn skipped(reason: &str) -> Outcome {
        Outcome {
            verdict: Verdict::Skipped {
                reason: reason.to_string(),
            },
            findings: Vec::new(),
        }
    }
}

fn canonical(cycle: &CycleAnalysis) -> &SystemState {
    &cycle.cycle_states.as_ref().expect("survey retains states")[0]
}

fn long_cluster(params: &ChainParams) -> bool {
    params.cluster_len() > params.half_cells()
}

fn eval_collapse(params: &ChainParams, survey: &ExhaustiveSurvey) -> Outcome {
    for cycle in &survey.cycles {
        let collapsed = cycle.regime == Regime::Collapse;
        if long_cluster(params) && !collapsed {
            return Outcome::violated(
                canonical(cycle),
                format!("cycle with velocity {} although l > m", cycle.velocity),
            );
        }
        if !long_cluster(params) && collapsed {
            return Outcome::violated(canonical(cycle), "zero-move fixed point".to_string());
        }
    }
    Outcome::holds()
}

fn eval_thresholds(params: &ChainParams, survey: &ExhaustiveSurvey) -> Outcome {
    let product = params.contours() as u64 * params.cluster_len() as u64;
    let limit = if params.contours() % 2 == 1 {
        params.half_cells() as u64
    } else {
        2 * params.half_cells() as u64
    };
    let offender = survey
        .cycles
        .iter()
        .find(|c| c.regime != Regime::FreeMovement);
    if product < limit {
        return match offender {
            None => Outcome::holds(),
            Some(cycle) => Outcome::violated(
                canonical(cycle),
                format!(
                    "velocity {} below the threshold guarantee",
                    cycle.velocity
                ),
            ),
        };
    }
    if product == limit {
        let finding = match offender {
            None => "boundary equality: every admissible state reaches free movement".to_string(),
            Some(cycle) => format!(
                "boundary equality: cycle with velocity {} from ({})",
                cycle.velocity,
                canonical(cycle)
            ),
        };
        let mut outcome = Outcome::skipped("boundary equality is recorded, not asserted");
        outcome.findings.push(finding);
        return outcome;
    }
    Outcome::skipped("threshold hypothesis not satisfied")
}

fn eval_free_existence(params: &ChainParams, survey: &ExhaustiveSurvey) -> Outcome {
    let free_entry = survey
        .report
        .entries
        .iter()
        .find(|e| e.velocity.is_one());
    match (long_cluster(params), free_entry) {
        (false, None) => {
            let zeros = SystemState::new(vec![0; params.contours() as usize], params).unwrap();
            Outcome::violated(&zeros, "no velocity-1 cycle although l <= m".to_string())
        }
        (true, Some(entry)) => Outcome::violated(
            &entry.representative,
            "velocity-1 cycle although l > m".to_string(),
        ),
        _ => Outcome::holds(),
    }
}

fn eval_velocity_range(params: &ChainParams, survey: &ExhaustiveSurvey) -> Outcome {
    if long_cluster(params) {
        return Outcome::skipped("requires l <= m");
    }
    let floor = Rational::new(2, 3);
    let strict = params.cluster_len() < params.half_cells();
    for cycle in &survey.cycles {
        if cycle.regime != Regime::DelayedCycle {
            continue;
        }
        let v = cycle.velocity;
        let above_floor = if strict { v > floor } else { v >= floor };
        if !above_floor || v >= Rational::ONE {
            return Outcome::violated(
                canonical(cycle),
                format!("delayed velocity {v} outside the admitted range"),
            );
        }
    }
    Outcome::holds()
}

fn eval_count_bound(params: &ChainParams, survey: &ExhaustiveSurvey) -> Outcome {
    if long_cluster(params) {
        return Outcome::skipped("requires l <= m");
    }
    let bound = (params.contours() / 3) as usize;
    let sub_unit: Vec<_> = survey
        .report
        .entries
        .iter()
        .filter(|e| e.velocity < Rational::ONE)
        .collect();
    if sub_unit.len() > bound {
        return Outcome::violated(
            &sub_unit.last().unwrap().representative,
            format!(
                "{} sub-unit velocities exceed the bound {}",
                sub_unit.len(),
                bound
            ),
        );
    }
    Outcome::holds()
}

fn eval_candidate_soundness(survey: &ExhaustiveSurvey) -> Outcome {
    for entry in &survey.report.entries {
        if entry.velocity.is_zero() || entry.velocity.is_one() {
            continue;
        }
        if !survey.report.candidates.contains(&entry.velocity) {
            return Outcome::violated(
                &entry.representative,
                format!("velocity {} is not a candidate", entry.velocity),
            );
        }
    }
    Outcome::holds()
}

/// All sequences of `parts` values in `0..=cap` summing to `total`.
fn compositions(total: u64, parts: u64, cap: u64) -> Vec<Vec<u64>> {
    fn rec(total: u64, parts: u64, cap: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let hi = cap.min(total);
        for k in 0..=hi {
            if total - k > (parts - 1) * cap {
                continue;
            }
            prefix.push(k);
            rec(total - k, parts - 1, cap, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, cap, &mut Vec::new(), &mut out);
    out
}

fn eval_sufficiency(params: &ChainParams) -> Outcome {
    if long_cluster(params) {
        return Outcome::skipped("requires l <= m");
    }
    let t = accounting_period(params);
    let cells = params.cells() as u64;
    let l = params.cluster_len() as u64;
    let mut constructed = 0u64;
    let mut findings = Vec::new();
    for turns in 1..=t / cells {
        let residual = t - cells * turns;
        if residual > turns * l {
            continue;
        }
        for delays in compositions(residual, turns, l) {
            let decomposition = DelayDecomposition::first(delays);
            if let Err(err) = construct_cycle_state(params, &decomposition) {
                let witness = schedule_state(params, &decomposition)
                    .unwrap_or_else(|_| SystemState::new(vec![0; params.contours() as usize], params).unwrap());
                return Outcome::violated(
                    &witness,
                    format!(
                        "first-type decomposition r={} k={:?} failed: {err}",
                        decomposition.turns, decomposition.delays
                    ),
                );
            }
            constructed += 1;
        }
    }
    findings.push(format!(
        "constructed {constructed} feasible first-type decompositions"
    ));

    // second-type realizability is not asserted anywhere; record how the
    // mirrored construction fares
    if l >= 2 {
        let cap = l - 1;
        let mut ok = 0u64;
        let mut failed = Vec::new();
        for turns in 1..=t / cells {
            let residual = t - cells * turns;
            if residual > turns * cap {
                continue;
            }
            for delays in compositions(residual, turns, cap) {
                let decomposition = DelayDecomposition::second(delays);
                match construct_cycle_state(params, &decomposition) {
                    Ok(_) => ok += 1,
                    Err(err) => failed.push(format!(
                        "second-type r={} k={:?}: {err}",
                        decomposition.turns, decomposition.delays
                    )),
                }
            }
        }
        findings.push(format!(
            "second-type decompositions: {ok} constructed, {} failed",
            failed.len()
        ));
        findings.extend(failed);
    }
    Outcome {
        verdict: Verdict::Holds,
        findings,
    }
}

struct StructureOutcomes {
    chain_timing: Outcome,
    purity: Outcome,
    first_gap: Outcome,
    second_gap: Outcome,
    uniformity: Outcome,
}

fn eval_structure(params: &ChainParams, survey: &ExhaustiveSurvey) -> StructureOutcomes {
    let mut out = StructureOutcomes {
        chain_timing: Outcome::holds(),
        purity: Outcome::holds(),
        first_gap: Outcome::holds(),
        second_gap: Outcome::holds(),
        uniformity: Outcome::holds(),
    };
    let t = accounting_period(params);
    for cycle in &survey.cycles {
        let witness = canonical(cycle);
        if out.uniformity.verdict == Verdict::Holds && !velocities(cycle).uniform {
            out.uniformity = Outcome::violated(
                witness,
                format!("per-cluster move counts {:?}", cycle.moves_per_cluster),
            );
        }
        if cycle.regime != Regime::DelayedCycle {
            continue;
        }
        if out.chain_timing.verdict == Verdict::Holds && !t.is_multiple_of(cycle.period) {
            out.chain_timing = Outcome::violated(
                witness,
                format!("period {} does not divide {}", cycle.period, t),
            );
        }
        let report = verify_delay_structure(cycle, params).expect("delayed cycle with states");
        if out.purity.verdict == Verdict::Holds && !report.purity_ok() {
            out.purity = Outcome::violated(
                witness,
                format!("delay purity {:?}", report.purity),
            );
        }
        if out.first_gap.verdict == Verdict::Holds {
            if let Some(v) = report.first_delta_violations.first() {
                out.first_gap = Outcome::violated(witness, v.clone());
            }
        }
        if out.second_gap.verdict == Verdict::Holds {
            if let Some(v) = report.second_delta_violations.first() {
                out.second_gap = Outcome::violated(witness, v.clone());
            }
        }
        if out.chain_timing.verdict == Verdict::Holds {
            if let Some(v) = report.chain_violations.first() {
                out.chain_timing = Outcome::violated(witness, v.clone());
            }
        }
        for finding in report
            .duration_findings
            .iter()
            .filter(|f| !f.holds)
        {
            out.chain_timing.findings.push(format!(
                "duration inequality: cluster {} run of {} followed by longer run of {} from ({})",
                finding.cluster, finding.duration, finding.successor_duration, witness
            ));
        }
    }
    out
}

fn evaluate_point(params: &ChainParams, survey: &ExhaustiveSurvey) -> Vec<(ClaimId, Outcome)> {
    let structure = eval_structure(params, survey);
    vec![
        (ClaimId::Collapse, eval_collapse(params, survey)),
        (ClaimId::ChainTiming, structure.chain_timing),
        (ClaimId::Purity, structure.purity),
        (ClaimId::FreeExistence, eval_free_existence(params, survey)),
        (ClaimId::VelocityRange, eval_velocity_range(params, survey)),
        (ClaimId::CountBound, eval_count_bound(params, survey)),
        (ClaimId::Thresholds, eval_thresholds(params, survey)),
        (ClaimId::FirstDelayGap, structure.first_gap),
        (ClaimId::SecondDelayGap, structure.second_gap),
        (ClaimId::Uniformity, structure.uniformity),
        (ClaimId::CandidateSoundness, eval_candidate_soundness(survey)),
        (ClaimId::ConstructiveSufficiency, eval_sufficiency(params)),
    ]
}

fn skipped_point(params: &ChainParams, reason: &str) -> Vec<(ClaimId, Outcome)> {
    let _ = params;
    ClaimId::ALL
        .iter()
        .map(|&claim| (claim, Outcome::skipped(reason)))
        .collect()
}

fn survey_or_skip(
    params: &ChainParams,
    budget: u64,
) -> Result<ExhaustiveSurvey, String> {
    match exhaustive_survey(params, budget) {
        Ok(survey) => Ok(survey),
        Err(SpectrumError::BudgetExceeded { space, budget }) => Err(format!(
            "state space {space} exceeds budget {budget}"
        )),
        Err(other) => panic!("exhaustive survey failed: {other}"),
    }
}

/// Collapse dichotomy at one point.
pub fn check_collapse(params: &ChainParams, budget: u64) -> PointVerdict {
    single_check(params, budget, |survey| eval_collapse(params, survey))
}

/// Strict free-movement threshold at one point; boundary becomes a finding.
pub fn check_free_movement_thresholds(params: &ChainParams, budget: u64) -> PointVerdict {
    single_check(params, budget, |survey| eval_thresholds(params, survey))
}

fn single_check(
    params: &ChainParams,
    budget: u64,
    eval: impl FnOnce(&ExhaustiveSurvey) -> Outcome,
) -> PointVerdict {
    let outcome = match survey_or_skip(params, budget) {
        Ok(survey) => eval(&survey),
        Err(reason) => Outcome::skipped(&reason),
    };
    PointVerdict {
        params: *params,
        verdict: outcome.verdict,
        findings: outcome.findings,
    }
}

/// Spectrum-shaped claims at one point: free existence, velocity range,
/// count bound, candidate soundness, constructive sufficiency.
pub fn check_spectrum_claims(params: &ChainParams, budget: u64) -> Vec<(ClaimId, PointVerdict)> {
    let outcomes = match survey_or_skip(params, budget) {
        Ok(survey) => vec![
            (ClaimId::FreeExistence, eval_free_existence(params, &survey)),
            (ClaimId::VelocityRange, eval_velocity_range(params, &survey)),
            (ClaimId::CountBound, eval_count_bound(params, &survey)),
            (ClaimId::CandidateSoundness, eval_candidate_soundness(&survey)),
            (ClaimId::ConstructiveSufficiency, eval_sufficiency(params)),
        ],
        Err(reason) => vec![
            (ClaimId::FreeExistence, Outcome::skipped(&reason)),
            (ClaimId::VelocityRange, Outcome::skipped(&reason)),
            (ClaimId::CountBound, Outcome::skipped(&reason)),
            (ClaimId::CandidateSoundness, Outcome::skipped(&reason)),
            (ClaimId::ConstructiveSufficiency, Outcome::skipped(&reason)),
        ],
    };
    outcomes
        .into_iter()
        .map(|(claim, outcome)| {
            (
                claim,
                PointVerdict {
                    params: *params,
                    verdict: outcome.verdict,
                    findings: outcome.findings,
                },
            )
        })
        .collect()
}

/// Per-cycle structural claims at one point: chain timing, purity, both
/// delay-gap sizes, velocity uniformity.
pub fn check_cycle_structure(params: &ChainParams, budget: u64) -> Vec<(ClaimId, PointVerdict)> {
    let outcomes = match survey_or_skip(params, budget) {
        Ok(survey) => {
            let s = eval_structure(params, &survey);
            vec![
                (ClaimId::ChainTiming, s.chain_timing),
                (ClaimId::Purity, s.purity),
                (ClaimId::FirstDelayGap, s.first_gap),
                (ClaimId::SecondDelayGap, s.second_gap),
                (ClaimId::Uniformity, s.uniformity),
            ]
        }
        Err(reason) => vec![
            (ClaimId::ChainTiming, Outcome::skipped(&reason)),
            (ClaimId::Purity, Outcome::skipped(&reason)),
            (ClaimId::FirstDelayGap, Outcome::skipped(&reason)),
            (ClaimId::SecondDelayGap, Outcome::skipped(&reason)),
            (ClaimId::Uniformity, Outcome::skipped(&reason)),
        ],
    };
    outcomes
        .into_iter()
        .map(|(claim, outcome)| {
            (
                claim,
                PointVerdict {
                    params: *params,
                    verdict: outcome.verdict,
                    findings: outcome.findings,
                },
            )
        })
        .collect()
}

/// Run every claim at every grid point, in canonical order.
pub fn run_suite(grid: &GridSpec) -> Result<SuiteReport, HarnessError> {
    let points = grid.points()?;
    let mut claims: Vec<ClaimReport> = ClaimId::ALL
        .iter()
        .map(|&claim| ClaimReport {
            claim,
            verdicts: Vec::new(),
        })
        .collect();
    for params in &points {
        let outcomes = match survey_or_skip(params, grid.budget) {
            Ok(survey) => evaluate_point(params, &survey),
            Err(reason) => skipped_point(params, &reason),
        };
        debug_assert_eq!(outcomes.len(), claims.len());
        for ((claim, outcome), report) in outcomes.into_iter().zip(claims.iter_mut()) {
            debug_assert_eq!(claim, report.claim);
            report.verdicts.push(PointVerdict {
                params: *params,
                verdict: outcome.verdict,
                findings: outcome.findings,
            });
        }
    }
    Ok(SuiteReport {
        grid: *grid,
        points: points.len(),
        claims,
    })
}

#[derive(Serialize)]
struct VerdictDoc<'a> {
    params: &'a ChainParams,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a SystemState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    findings: Vec<&'a str>,
}

#[derive(Serialize)]
struct ClaimDoc<'a> {
    claim: &'static str,
    verdicts: Vec<VerdictDoc<'a>>,
}

#[derive(Serialize)]
struct GridDoc {
    n: [u32; 2],
    m: [u32; 2],
    l: [String; 2],
    budget: u64,
    points: usize,
}

#[derive(Serialize)]
struct SuiteDoc<'a> {
    schema_version: u32,
    grid: GridDoc,
    claims: Vec<ClaimDoc<'a>>,
    summary: SummaryDoc,
}

#[derive(Serialize)]
struct SummaryDoc {
    holds: usize,
    violated: usize,
    skipped: usize,
    findings: usize,
}

impl SuiteReport {
    fn summary(&self) -> (usize, usize, usize, usize) {
        let mut holds = 0;
        let mut violated = 0;
        let mut skipped = 0;
        let mut findings = 0;
        for claim in &self.claims {
            for pv in &claim.verdicts {
                match pv.verdict {
                    Verdict::Holds => holds += 1,
                    Verdict::Violated { .. } => violated += 1,
                    Verdict::Skipped { .. } => skipped += 1,
                }
                findings += pv.findings.len();
            }
        }
        (holds, violated, skipped, findings)
    }

    pub fn to_json(&self) -> String {
        let (holds, violated, skipped, findings) = self.summary();
        let doc = SuiteDoc {
            schema_version: 1,
            grid: GridDoc {
                n: [self.grid.contours.0, self.grid.contours.1],
                m: [self.grid.half_cells.0, self.grid.half_cells.1],
                l: [
                    self.grid.cluster_len.0.to_string(),
                    self.grid.cluster_len.1.to_string(),
                ],
                budget: self.grid.budget,
                points: self.points,
            },
            claims: self
                .claims
                .iter()
                .map(|c| ClaimDoc {
                    claim: c.claim.label(),
                    verdicts: c
                        .verdicts
                        .iter()
                        .map(|pv| {
                            let (verdict, witness, detail, reason) = match &pv.verdict {
                                Verdict::Holds => ("holds", None, None, None),
                                Verdict::Violated { witness, detail } => {
                                    ("violated", Some(witness), Some(detail.as_str()), None)
                                }
                                Verdict::Skipped { reason } => {
                                    ("skipped", None, None, Some(reason.as_str()))
                                }
                            };
                            VerdictDoc {
                                params: &pv.params,
                                verdict,
                                witness,
                                detail,
                                reason,
                                findings: pv.findings.iter().map(String::as_str).collect(),
                            }
                        })
                        .collect(),
                })
                .collect(),
            summary: SummaryDoc {
                holds,
                violated,
                skipped,
                findings,
            },
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("claim,N,m,l,verdict,detail\n");
        for claim in &self.claims {
            for pv in &claim.verdicts {
                let (verdict, detail) = match &pv.verdict {
                    Verdict::Holds => ("holds", String::new()),
                    Verdict::Violated { witness, detail } => {
                        ("violated", format!("{detail}; witness ({witness})"))
                    }
                    Verdict::Skipped { reason } => ("skipped", reason.clone()),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},\"{}\"",
                    claim.claim.label(),
                    pv.params.contours(),
                    pv.params.half_cells(),
                    pv.params.cluster_len(),
                    verdict,
                    detail.replace('"', "\"\"")
                )
                .unwrap();
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let (holds, violated, skipped, findings) = self.summary();
        let mut out = format!(
            "verification of {} budget={} ({} points)\n",
            self.grid, self.grid.budget, self.points
        );
        writeln!(
            out,
            "{:<16} {:>6} {:>9} {:>8}",
            "claim", "holds", "violated", "skipped"
        )
        .unwrap();
        for claim in &self.claims {
            let mut h = 0;
            let mut v = 0;
            let mut s = 0;
            for pv in &claim.verdicts {
                match pv.verdict {
                    Verdict::Holds => h += 1,
                    Verdict::Violated { .. } => v += 1,
                    Verdict::Skipped { .. } => s += 1,
                }
            }
            writeln!(
                out,
                "{:<16} {:>6} {:>9} {:>8}",
                claim.claim.label(),
                h,
                v,
                s
            )
            .unwrap();
        }
        for claim in &self.claims {
            for pv in &claim.verdicts {
                if let Verdict::Violated { witness, detail } = &pv.verdict {
                    writeln!(
                        out,
                        "VIOLATED {} at N={} m={} l={}: {} (witness {})",
                        claim.claim.label(),
                        pv.params.contours(),
                        pv.params.half_cells(),
                        pv.params.cluster_len(),
                        detail,
                        witness
                    )
                    .unwrap();
                }
            }
        }
        let mut finding_lines = 0;
        for claim in &self.claims {
            for pv in &claim.verdicts {
                for finding in &pv.findings {
                    if finding_lines == 0 {
                        writeln!(out, "findings:").unwrap();
                    }
                    finding_lines += 1;
                    writeln!(
                        out,
                        "  {} N={} m={} l={}: {}",
                        claim.claim.label(),
                        pv.params.contours(),
                        pv.params.half_cells(),
                        pv.params.cluster_len(),
                        finding
                    )
                    .unwrap();
                }
            }
        }
        writeln!(
            out,
            "summary: {holds} holds, {violated} violated, {skipped} skipped, {findings} findings"
        )
        .unwrap();
        writeln!(
            out,
            "result: {}",
            if self.all_hold() {
                "all asserted claims hold"
            } else {
                "VIOLATIONS FOUND"
            }
        )
        .unwrap();
        out
    }
}
