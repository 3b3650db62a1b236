//! Trajectory analysis: cycle detection, velocities, delay structure.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, ChainParams, DelayType, SystemState};
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbitError {
    #[error(transparent)]
    BadState(#[from] ChainError),
    #[error("step budget {budget} exhausted after {steps} steps without a repeat")]
    BudgetExhausted { budget: u64, steps: u64 },
    #[error("analysis does not describe a delayed cycle")]
    NotDelayedCycle,
    #[error("analysis was run without retaining cycle states")]
    MissingCycleStates,
}

/// Long-run behaviour of a trajectory's terminal cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every cluster moves on every step of the cycle; period is `2m`.
    FreeMovement,
    /// Fixed point with no movement at all.
    Collapse,
    /// Periodic with at least one delay per period.
    DelayedCycle,
}

/// Which delay types occur on the cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayPurity {
    None,
    #[serde(rename = "first")]
    FirstOnly,
    #[serde(rename = "second")]
    SecondOnly,
    Mixed,
}

/// One delay on the cycle; `time` counts steps from the cycle start.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DelayRecord {
    pub time: u64,
    pub cluster: usize,
    pub delay_type: DelayType,
    pub node: usize,
}

#[derive(Clone, Debug)]
pub struct CycleAnalysis {
    pub transient_len: u64,
    pub period: u64,
    /// Steps on which each cluster moved, over one period.
    pub moves_per_cluster: Vec<u64>,
    /// `moves_per_cluster[0] / period`; the clusters agree on every cycle
    /// observed, see `velocities` for the per-cluster report.
    pub velocity: Rational,
    pub regime: Regime,
    pub delay_purity: DelayPurity,
    pub delay_log: Vec<DelayRecord>,
    /// The cycle itself, starting at the first repeated state.
    pub cycle_states: Option<Vec<SystemState>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Detection {
    /// Hash every visited state; exact transient, memory `O(transient + period)`.
    FullIndex,
    /// Brent's algorithm; exact transient, constant memory, a few times the
    /// steps of `FullIndex`.
    ConstantMemory,
}

#[derive(Clone, Copy, Debug)]
pub struct CycleOptions {
    /// Bound on the trajectory prefix searched. `None` means the state-space
    /// size, which always suffices. `FullIndex` fails exactly when
    /// `transient + period` exceeds the budget; `ConstantMemory` walks up to
    /// ~4x the budget before failing and so may succeed on slightly longer
    /// trajectories.
    pub budget: Option<u64>,
    pub detection: Detection,
    pub retain_states: bool,
}

impl Default for CycleOptions {
    fn default() -> CycleOptions {
        CycleOptions {
            budget: None,
            detection: Detection::FullIndex,
            retain_states: true,
        }
    }
}

fn default_budget(params: &ChainParams) -> u64 {
    params
        .state_space_size()
        .and_then(|s| u64::try_from(s).ok())
        .unwrap_or(u64::MAX)
}

/// Run the trajectory of `initial` until it repeats and analyze the cycle.
pub fn find_cycle(
    initial: &SystemState,
    params: &ChainParams,
    opts: &CycleOptions,
) -> Result<CycleAnalysis, OrbitError> {
    params.check_state(initial)?;
    if !params.is_admissible(initial) {
        return Err(ChainError::Inadmissible.into());
    }
    let budget = opts.budget.unwrap_or_else(|| default_budget(params));
    let (transient_len, period) = match opts.detection {
        Detection::FullIndex => detect_full(initial, params, budget)?,
        Detection::ConstantMemory => detect_brent(initial, params, budget)?,
    };

    let mut cur = initial.clone();
    for _ in 0..transient_len {
        cur = params.step(&cur).next;
    }
    let cycle_start = cur.clone();
    let n = params.contours() as usize;
    let mut moves_per_cluster = vec![0u64; n];
    let mut delay_log = Vec::new();
    let mut cycle_states = opts
        .retain_states
        .then(|| Vec::with_capacity(period as usize));
    for time in 0..period {
        if let Some(states) = cycle_states.as_mut() {
            states.push(cur.clone());
        }
        let result = params.step(&cur);
        for (count, &did_move) in moves_per_cluster.iter_mut().zip(&result.moved) {
            *count += u64::from(did_move);
        }
        for ev in result.delays {
            delay_log.push(DelayRecord {
                time,
                cluster: ev.cluster,
                delay_type: ev.delay_type,
                node: ev.node,
            });
        }
        cur = result.next;
    }
    debug_assert_eq!(cur, cycle_start);

    let regime = if period == 1 && moves_per_cluster.iter().all(|&m| m == 0) {
        Regime::Collapse
    } else if moves_per_cluster.iter().all(|&m| m == period) {
        Regime::FreeMovement
    } else {
        Regime::DelayedCycle
    };
    let delay_purity = purity_of(&delay_log);
    let velocity = Rational::new(moves_per_cluster[0], period);
    Ok(CycleAnalysis {
        transient_len,
        period,
        moves_per_cluster,
        velocity,
        regime,
        delay_purity,
        delay_log,
        cycle_states,
    })
}

fn purity_of(log: &[DelayRecord]) -> DelayPurity {
    let mut first = false;
    let mut second = false;
    for rec in log {
        match rec.delay_type {
            DelayType::First => first = true,
            DelayType::Second => second = true,
        }
    }
    match (first, second) {
        (false, false) => DelayPurity::None,
        (true, false) => DelayPurity::FirstOnly,
        (false, true) => DelayPurity::SecondOnly,
        (true, true) => DelayPurity::Mixed,
    }
}

fn detect_full(
    initial: &SystemState,
    params: &ChainParams,
    budget: u64,
) -> Result<(u64, u64), OrbitError> {
    let mut seen: HashMap<SystemState, u64> = HashMap::new();
    let mut cur = initial.clone();
    let mut time: u64 = 0;
    loop {
        if let Some(&first_visit) = seen.get(&cur) {
            return Ok((first_visit, time - first_visit));
        }
        if time == budget {
            return Err(OrbitError::BudgetExhausted {
                budget,
                steps: time,
            });
        }
        seen.insert(cur.clone(), time);
        cur = params.step(&cur).next;
        time += 1;
    }
}

fn detect_brent(
    initial: &SystemState,
    params: &ChainParams,
    budget: u64,
) -> Result<(u64, u64), OrbitError> {
    // Brent's teleporting tortoise needs up to ~4x (transient + period)
    // applications, so the cutoff leaves that headroom; a budget of at
    // least the state-space size still never trips it.
    let cutoff = budget.saturating_mul(4).saturating_add(4);
    let mut power: u64 = 1;
    let mut period: u64 = 1;
    let mut tortoise = initial.clone();
    let mut hare = params.step(initial).next;
    let mut steps: u64 = 1;
    while tortoise != hare {
        if power == period {
            tortoise = hare.clone();
            power = power.saturating_mul(2);
            period = 0;
        }
        hare = params.step(&hare).next;
        steps += 1;
        period += 1;
        if steps > cutoff {
            return Err(OrbitError::BudgetExhausted { budget, steps });
        }
    }

    let mut tortoise = initial.clone();
    let mut hare = initial.clone();
    for _ in 0..period {
        hare = params.step(&hare).next;
    }
    let mut transient: u64 = 0;
    while tortoise != hare {
        tortoise = params.step(&tortoise).next;
        hare = params.step(&hare).next;
        transient += 1;
        if transient > budget {
            return Err(OrbitError::BudgetExhausted {
                budget,
                steps: steps + period + 2 * transient,
            });
        }
    }
    Ok((transient, period))
}

#[derive(Clone, Debug, Serialize)]
pub struct VelocityReport {
    pub per_cluster: Vec<Rational>,
    pub uniform: bool,
}

/// Per-cluster average speeds over one period.
pub fn velocities(analysis: &CycleAnalysis) -> VelocityReport {
    let per_cluster: Vec<Rational> = analysis
        .moves_per_cluster
        .iter()
        .map(|&m| Rational::new(m, analysis.period))
        .collect();
    let uniform = per_cluster.windows(2).all(|w| w[0] == w[1]);
    VelocityReport {
        per_cluster,
        uniform,
    }
}

/// Maximal run of consecutive steps on which one cluster sits delayed.
/// Runs are circular over the period.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DelayRun {
    pub cluster: usize,
    pub delay_type: DelayType,
    pub start: u64,
    pub duration: u64,
}

/// Report-only comparison of one delay run against its chained successor.
#[derive(Clone, Debug, Serialize)]
pub struct DurationFinding {
    pub delay_type: DelayType,
    pub cluster: usize,
    pub successor: usize,
    pub duration: u64,
    pub successor_duration: u64,
    /// Whether `duration >= successor_duration`.
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub purity: DelayPurity,
    pub runs: Vec<DelayRun>,
    /// First-type runs whose final step does not leave the gap ahead of the
    /// delaying cluster's predecessor at `m - l` cells.
    pub first_delta_violations: Vec<String>,
    /// Second-type runs whose final step does not leave the gap ahead of the
    /// delaying cluster at `m + l` cells.
    pub second_delta_violations: Vec<String>,
    /// Runs with no successor run starting `m + l` steps later on the
    /// expected neighbour.
    pub chain_violations: Vec<String>,
    pub duration_findings: Vec<DurationFinding>,
}

impl StructureReport {
    pub fn purity_ok(&self) -> bool {
        matches!(self.purity, DelayPurity::FirstOnly | DelayPurity::SecondOnly)
    }

    /// Purity plus all hard structure checks. Duration findings stay advisory.
    pub fn structure_ok(&self) -> bool {
        self.purity_ok()
            && self.first_delta_violations.is_empty()
            && self.second_delta_violations.is_empty()
            && self.chain_violations.is_empty()
    }
}

/// Check the delay pattern of a delayed cycle: single delay type, the exact
/// gap each delay run restores when it ends, and the `m + l` step spacing
/// between chained runs on neighbouring contours.
pub fn verify_delay_structure(
    analysis: &CycleAnalysis,
    params: &ChainParams,
) -> Result<StructureReport, OrbitError> {
    if analysis.regime != Regime::DelayedCycle {
        return Err(OrbitError::NotDelayedCycle);
    }
    let states = analysis
        .cycle_states
        .as_ref()
        .ok_or(OrbitError::MissingCycleStates)?;
    let period = analysis.period;
    let n = params.contours() as usize;
    let cells = params.cells();
    let runs = delay_runs(&analysis.delay_log, period, n);

    let mut report = StructureReport {
        purity: analysis.delay_purity,
        runs: runs.clone(),
        first_delta_violations: Vec::new(),
        second_delta_violations: Vec::new(),
        chain_violations: Vec::new(),
        duration_findings: Vec::new(),
    };

    for run in &runs {
        let end = ((run.start + run.duration) % period) as usize;
        let at_end = &states[end];
        match run.delay_type {
            DelayType::First => {
                // gap measured on the contour behind the delayed cluster
                let want = (cells + params.half_cells() - params.cluster_len()) % cells;
                let got = params.delta(at_end, (run.cluster + n - 1) % n);
                if got != want {
                    report.first_delta_violations.push(format!(
                        "run at t={} cluster {}: delta {} != {} at end state ({})",
                        run.start, run.cluster, got, want, at_end
                    ));
                }
            }
            DelayType::Second => {
                let want = (params.half_cells() + params.cluster_len()) % cells;
                let got = params.delta(at_end, run.cluster);
                if got != want {
                    report.second_delta_violations.push(format!(
                        "run at t={} cluster {}: delta {} != {} at end state ({})",
                        run.start, run.cluster, got, want, at_end
                    ));
                }
            }
        }

        let successor = match run.delay_type {
            DelayType::First => (run.cluster + 1) % n,
            DelayType::Second => (run.cluster + n - 1) % n,
        };
        let expected_start = (run.start + (params.half_cells() + params.cluster_len()) as u64)
            % period;
        match runs.iter().find(|r| {
            r.cluster == successor && r.delay_type == run.delay_type && r.start == expected_start
        }) {
            Some(next) => report.duration_findings.push(DurationFinding {
                delay_type: run.delay_type,
                cluster: run.cluster,
                successor,
                duration: run.duration,
                successor_duration: next.duration,
                holds: run.duration >= next.duration,
            }),
            None => report.chain_violations.push(format!(
                "run at t={} cluster {}: no {:?}-type run on cluster {} at t={}",
                run.start, run.cluster, run.delay_type, successor, expected_start
            )),
        }
    }
    Ok(report)
}

fn delay_runs(log: &[DelayRecord], period: u64, contours: usize) -> Vec<DelayRun> {
    let mut runs = Vec::new();
    for cluster in 0..contours {
        let mut times: Vec<(u64, DelayType)> = log
            .iter()
            .filter(|r| r.cluster == cluster)
            .map(|r| (r.time, r.delay_type))
            .collect();
        times.sort_unstable_by_key(|&(t, _)| t);
        if times.is_empty() {
            continue;
        }
        let mut cluster_runs: Vec<DelayRun> = Vec::new();
        for &(time, delay_type) in &times {
            match cluster_runs.last_mut() {
                Some(run)
                    if run.delay_type == delay_type
                        && run.start + run.duration == time =>
                {
                    run.duration += 1;
                }
                _ => cluster_runs.push(DelayRun {
                    cluster,
                    delay_type,
                    start: time,
                    duration: 1,
                }),
            }
        }
        // a run spanning the period boundary is one run
        if cluster_runs.len() > 1 {
            let first = cluster_runs[0];
            let last = *cluster_runs.last().unwrap();
            if first.start == 0
                && last.start + last.duration == period
                && first.delay_type == last.delay_type
            {
                cluster_runs[0].start = last.start;
                cluster_runs[0].duration += last.duration;
                cluster_runs.pop();
            }
        }
        runs.extend(cluster_runs);
    }
    runs.sort_unstable_by_key(|r| (r.start, r.cluster));
    runs
}

/// One row of a step-by-step trajectory log. Row 0 is the initial state;
/// row `t > 0` holds the state after step `t` together with that step's
/// movement flags and delays.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub time: u64,
    pub state: SystemState,
    pub moved: Vec<bool>,
    pub delays: Vec<crate::chain::DelayEvent>,
}

pub fn trace(
    initial: &SystemState,
    params: &ChainParams,
    steps: u64,
) -> Result<Vec<TraceRow>, OrbitError> {
    params.check_state(initial)?;
    if !params.is_admissible(initial) {
        return Err(ChainError::Inadmissible.into());
    }
    let mut rows = Vec::with_capacity(steps as usize + 1);
    let mut cur = initial.clone();
    rows.push(TraceRow {
        time: 0,
        state: cur.clone(),
        moved: Vec::new(),
        delays: Vec::new(),
    });
    for time in 1..=steps {
        let result = params.step(&cur);
        cur = result.next.clone();
        rows.push(TraceRow {
            time,
            state: result.next,
            moved: result.moved,
            delays: result.delays,
        });
    }
    Ok(rows)
}
