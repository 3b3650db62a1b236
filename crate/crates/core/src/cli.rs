//! Command-line front end.
//!
//! Exit codes: 0 success (and all claims hold for `verify`), 1 usage error,
//! 2 infeasible or inadmissible input, 3 claim violation.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chain::{ChainParams, DelayType, SystemState};
use crate::harness::{run_suite, GridSpec, HarnessError};
use crate::orbit::{find_cycle, trace, velocities, CycleAnalysis, CycleOptions, TraceRow};
use crate::rational::Rational;
use crate::spectrum::{
    candidate_velocities, construct_cycle_state, empirical_spectrum, purity_str, regime_str,
    DelayDecomposition, Exploration, SpectrumError, DEFAULT_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser)]
#[command(
    name = "contour-chain",
    version,
    about = "Closed chains of contours with cluster movement: simulate trajectories, \
             measure velocity spectra, construct cycles, verify structural claims"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one trajectory: limit-cycle summary, or a step trace
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial state as comma-separated leading-particle cells
        #[arg(long)]
        state: String,
        /// Number of steps to trace
        #[arg(long, requires = "trace")]
        steps: Option<u64>,
        /// Emit a step-by-step trace instead of the cycle summary
        #[arg(long, requires = "steps")]
        trace: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Velocity spectrum over admissible initial states
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        /// Sample this many admissible states instead of enumerating all
        #[arg(long)]
        sample: Option<u64>,
        /// Seed for sampled exploration
        #[arg(long, default_value_t = 0, requires = "sample")]
        seed: u64,
        /// Max states for exhaustive enumeration
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the structural claims over a parameter grid
    Verify {
        /// Grid expression, e.g. N=2..5,m=1..4,l=1..2m-1
        #[arg(long, default_value = "N=2..5,m=1..4,l=1..2m-1")]
        grid: String,
        /// Max states per grid point
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a cycle state from a delay decomposition
    Construct {
        #[command(flatten)]
        params: ParamArgs,
        /// Per-turn delay durations k1,k2,...
        #[arg(long, value_delimiter = ',', required = true)]
        delays: Vec<u64>,
        /// Delay type of the requested cycle
        #[arg(long = "type", value_enum)]
        delay_type: DelayTypeArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Theoretical candidate velocities
    Candidates {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Number of contours
    #[arg(short = 'N', long)]
    contours: u32,
    /// Half the cells per contour
    #[arg(short = 'm', long)]
    half_cells: u32,
    /// Particles per cluster
    #[arg(short = 'l', long)]
    cluster_len: u32,
}

impl ParamArgs {
    fn build(&self) -> Result<ChainParams, Failure> {
        ChainParams::new(self.contours, self.half_cells, self.cluster_len).map_err(infeasible)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelayTypeArg {
    First,
    Second,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

fn infeasible(err: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INFEASIBLE,
        message: err.to_string(),
    }
}

fn usage(err: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: err.to_string(),
    }
}

fn spectrum_failure(err: SpectrumError) -> Failure {
    let code = match err {
        SpectrumError::VerificationFailed(_) => EXIT_VIOLATION,
        _ => EXIT_INFEASIBLE,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn harness_failure(err: HarnessError) -> Failure {
    match err {
        HarnessError::BadGrid { .. } => usage(err),
        HarnessError::Chain(_) => infeasible(err),
    }
}

/// Parse arguments from the environment, run, and return the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            params,
            state,
            steps,
            trace: want_trace,
            output,
        } => cmd_simulate(&params, &state, steps, want_trace, &output),
        Command::Spectrum {
            params,
            sample,
            seed,
            budget,
            output,
        } => cmd_spectrum(&params, sample, seed, budget, &output),
        Command::Verify {
            grid,
            budget,
            output,
        } => cmd_verify(&grid, budget, &output),
        Command::Construct {
            params,
            delays,
            delay_type,
            output,
        } => cmd_construct(&params, delays, delay_type, &output),
        Command::Candidates { params, output } => cmd_candidates(&params, &output),
    }
}

fn parse_state(text: &str, params: &ChainParams) -> Result<SystemState, Failure> {
    let positions: Vec<u32> = text
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| infeasible(format!("cannot parse state `{text}`")))?;
    let state = SystemState::new(positions, params).map_err(infeasible)?;
    if !params.is_admissible(&state) {
        return Err(infeasible(format!("inadmissible state ({state})")));
    }
    Ok(state)
}

fn emit(output: &OutputArgs, content: String) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, content).map_err(|err| {
            usage(format!("cannot write {}: {err}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn json_line(value: impl Serialize) -> String {
    let mut out = serde_json::to_string_pretty(&value).expect("document serializes");
    out.push('\n');
    out
}

fn params_prefix(params: &ChainParams) -> String {
    format!(
        "N={} m={} l={}",
        params.contours(),
        params.half_cells(),
        params.cluster_len()
    )
}

#[derive(Serialize)]
struct SimulateDoc<'a> {
    schema_version: u32,
    command: &'static str,
    params: &'a ChainParams,
    state: &'a SystemState,
    transient_len: u64,
    period: u64,
    moves_per_cluster: &'a [u64],
    velocity: Rational,
    per_cluster_velocities: Vec<Rational>,
    uniform: bool,
    regime: &'static str,
    delay_type: &'static str,
}

fn cmd_simulate(
    params: &ParamArgs,
    state_text: &str,
    steps: Option<u64>,
    want_trace: bool,
    output: &OutputArgs,
) -> Result<(), Failure> {
    let params = params.build()?;
    let state = parse_state(state_text, &params)?;
    if want_trace {
        let rows = trace(&state, &params, steps.expect("clap ties steps to trace"))
            .map_err(infeasible)?;
        return emit(output, render_trace(&params, &state, &rows, output.format));
    }
    let analysis = find_cycle(&state, &params, &CycleOptions::default()).map_err(infeasible)?;
    emit(output, render_summary(&params, &state, &analysis, output.format))
}

fn render_summary(
    params: &ChainParams,
    state: &SystemState,
    analysis: &CycleAnalysis,
    format: Format,
) -> String {
    let report = velocities(analysis);
    match format {
        Format::Json => json_line(SimulateDoc {
            schema_version: 1,
            command: "simulate",
            params,
            state,
            transient_len: analysis.transient_len,
            period: analysis.period,
            moves_per_cluster: &analysis.moves_per_cluster,
            velocity: analysis.velocity,
            per_cluster_velocities: report.per_cluster,
            uniform: report.uniform,
            regime: regime_str(analysis.regime),
            delay_type: purity_str(analysis.delay_purity),
        }),
        Format::Csv => {
            let mut out =
                String::from("N,m,l,state,transient,period,velocity,regime,delay_type\n");
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                params.contours(),
                params.half_cells(),
                params.cluster_len(),
                state.to_string().replace(',', ";"),
                analysis.transient_len,
                analysis.period,
                analysis.velocity,
                regime_str(analysis.regime),
                purity_str(analysis.delay_purity)
            )
            .unwrap();
            out
        }
        Format::Text => {
            let moves: Vec<String> = analysis
                .moves_per_cluster
                .iter()
                .map(u64::to_string)
                .collect();
            let mut out = format!("simulate {} state=({state})\n", params_prefix(params));
            writeln!(out, "transient: {}", analysis.transient_len).unwrap();
            writeln!(out, "period: {}", analysis.period).unwrap();
            writeln!(out, "moves per cluster: {}", moves.join(",")).unwrap();
            writeln!(
                out,
                "velocity: {} ({})",
                analysis.velocity,
                if report.uniform {
                    "uniform"
                } else {
                    "NOT uniform"
                }
            )
            .unwrap();
            writeln!(out, "regime: {}", regime_str(analysis.regime)).unwrap();
            writeln!(out, "delay type: {}", purity_str(analysis.delay_purity)).unwrap();
            out
        }
    }
}

#[derive(Serialize)]
struct TraceDoc<'a> {
    schema_version: u32,
    command: &'static str,
    params: &'a ChainParams,
    state: &'a SystemState,
    steps: u64,
    rows: &'a [TraceRow],
}

fn render_trace(
    params: &ChainParams,
    state: &SystemState,
    rows: &[TraceRow],
    format: Format,
) -> String {
    match format {
        Format::Json => json_line(TraceDoc {
            schema_version: 1,
            command: "simulate",
            params,
            state,
            steps: rows.len() as u64 - 1,
            rows,
        }),
        Format::Csv => {
            let mut out = String::from("time,state,moved,delays\n");
            for row in rows {
                let moved: Vec<&str> = row
                    .moved
                    .iter()
                    .map(|&b| if b { "1" } else { "0" })
                    .collect();
                let delays: Vec<String> = row
                    .delays
                    .iter()
                    .map(|d| {
                        format!(
                            "{}:{}:{}",
                            d.cluster,
                            match d.delay_type {
                                DelayType::First => "first",
                                DelayType::Second => "second",
                            },
                            d.node
                        )
                    })
                    .collect();
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.time,
                    row.state.to_string().replace(',', ";"),
                    moved.join(";"),
                    delays.join("|")
                )
                .unwrap();
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "trace {} state=({state}) steps={}\n",
                params_prefix(params),
                rows.len() - 1
            );
            for row in rows {
                write!(out, "t={:<3} ({})", row.time, row.state).unwrap();
                if row.time > 0 {
                    let moved: Vec<String> = (0..row.moved.len())
                        .filter(|&i| row.moved[i])
                        .map(|i| i.to_string())
                        .collect();
                    write!(
                        out,
                        " moved={}",
                        if moved.is_empty() {
                            "-".to_string()
                        } else {
                            moved.join(",")
                        }
                    )
                    .unwrap();
                    for d in &row.delays {
                        write!(
                            out,
                            " delay={}:{}@node{}",
                            d.cluster,
                            match d.delay_type {
                                DelayType::First => "first",
                                DelayType::Second => "second",
                            },
                            d.node
                        )
                        .unwrap();
                    }
                }
                out.push('\n');
            }
            out
        }
    }
}

fn cmd_spectrum(
    params: &ParamArgs,
    sample: Option<u64>,
    seed: u64,
    budget: u64,
    output: &OutputArgs,
) -> Result<(), Failure> {
    let params = params.build()?;
    let exploration = match sample {
        Some(count) => Exploration::Sampled { count, seed },
        None => Exploration::Exhaustive { budget },
    };
    let report = empirical_spectrum(&params, exploration).map_err(spectrum_failure)?;
    emit(
        output,
        match output.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
            Format::Text => report.to_text(),
        },
    )
}

fn cmd_verify(grid_expr: &str, budget: u64, output: &OutputArgs) -> Result<(), Failure> {
    let grid = GridSpec::parse(grid_expr, budget).map_err(harness_failure)?;
    let report = run_suite(&grid).map_err(harness_failure)?;
    emit(
        output,
        match output.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
            Format::Text => report.to_text(),
        },
    )?;
    if report.all_hold() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VIOLATION,
            message: "asserted claims violated; see report".to_string(),
        })
    }
}

#[derive(Serialize)]
struct ConstructDoc<'a> {
    schema_version: u32,
    command: &'static str,
    params: &'a ChainParams,
    delay_type: &'static str,
    turns: u64,
    delays: &'a [u64],
    state: &'a SystemState,
    transient_len: u64,
    period: u64,
    velocity: Rational,
    regime: &'static str,
    verified_delay_type: &'static str,
}

fn cmd_construct(
    params: &ParamArgs,
    delays: Vec<u64>,
    delay_type: DelayTypeArg,
    output: &OutputArgs,
) -> Result<(), Failure> {
    let params = params.build()?;
    let decomposition = match delay_type {
        DelayTypeArg::First => DelayDecomposition::first(delays),
        DelayTypeArg::Second => DelayDecomposition::second(delays),
    };
    let state = construct_cycle_state(&params, &decomposition).map_err(spectrum_failure)?;
    let analysis = find_cycle(&state, &params, &CycleOptions::default()).map_err(infeasible)?;
    let type_str = match decomposition.delay_type {
        DelayType::First => "first",
        DelayType::Second => "second",
    };
    let content = match output.format {
        Format::Json => json_line(ConstructDoc {
            schema_version: 1,
            command: "construct",
            params: &params,
            delay_type: type_str,
            turns: decomposition.turns,
            delays: &decomposition.delays,
            state: &state,
            transient_len: analysis.transient_len,
            period: analysis.period,
            velocity: analysis.velocity,
            regime: regime_str(analysis.regime),
            verified_delay_type: purity_str(analysis.delay_purity),
        }),
        Format::Csv => {
            let delays: Vec<String> =
                decomposition.delays.iter().map(u64::to_string).collect();
            let mut out = String::from("N,m,l,type,delays,state,velocity,period,regime\n");
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                params.contours(),
                params.half_cells(),
                params.cluster_len(),
                type_str,
                delays.join(";"),
                state.to_string().replace(',', ";"),
                analysis.velocity,
                analysis.period,
                regime_str(analysis.regime)
            )
            .unwrap();
            out
        }
        Format::Text => {
            let delays: Vec<String> =
                decomposition.delays.iter().map(u64::to_string).collect();
            let mut out = format!(
                "construct {} type={} delays={}\n",
                params_prefix(&params),
                type_str,
                delays.join(",")
            );
            writeln!(out, "state: ({state})").unwrap();
            writeln!(out, "velocity: {}", analysis.velocity).unwrap();
            writeln!(out, "period: {}", analysis.period).unwrap();
            writeln!(out, "regime: {}", regime_str(analysis.regime)).unwrap();
            writeln!(out, "delay type: {}", purity_str(analysis.delay_purity)).unwrap();
            out
        }
    };
    emit(output, content)
}

#[derive(Serialize)]
struct CandidatesDoc<'a> {
    schema_version: u32,
    command: &'static str,
    params: &'a ChainParams,
    candidates: &'a [Rational],
}

fn cmd_candidates(params: &ParamArgs, output: &OutputArgs) -> Result<(), Failure> {
    let params = params.build()?;
    let candidates = candidate_velocities(&params);
    let content = match output.format {
        Format::Json => json_line(CandidatesDoc {
            schema_version: 1,
            command: "candidates",
            params: &params,
            candidates: &candidates,
        }),
        Format::Csv => {
            let mut out = String::from("N,m,l,velocity\n");
            for c in &candidates {
                writeln!(
                    out,
                    "{},{},{},{}",
                    params.contours(),
                    params.half_cells(),
                    params.cluster_len(),
                    c
                )
                .unwrap();
            }
            out
        }
        Format::Text => {
            let list: Vec<String> = candidates.iter().map(Rational::to_string).collect();
            format!(
                "candidates {}: {}\n",
                params_prefix(&params),
                list.join(", ")
            )
        }
    };
    emit(output, content)
}
