use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contour-chain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("simulate"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["simulate", "--bogus"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn seed_without_sample_is_usage_error() {
    let out = run(&["spectrum", "-N", "3", "-m", "2", "-l", "1", "--seed", "7"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn inadmissible_state_is_rejected() {
    let out = run(&["simulate", "-N", "3", "-m", "5", "-l", "2", "--state", "1,6,3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("inadmissible"));
}

#[test]
fn wrong_arity_state_is_rejected() {
    let out = run(&["simulate", "-N", "3", "-m", "5", "-l", "2", "--state", "1,5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("positions"));
}

#[test]
fn out_of_range_position_is_rejected() {
    let out = run(&["simulate", "-N", "3", "-m", "5", "-l", "2", "--state", "1,5,99"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn bad_params_are_rejected() {
    let out = run(&["candidates", "-N", "1", "-m", "5", "-l", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("at least 2 contours"));
}

#[test]
fn single_contour_grid_is_rejected() {
    let out = run(&["verify", "--grid", "N=1..1,m=2,l=1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("at least 2 contours"));
}

#[test]
fn malformed_grid_is_usage_error() {
    let out = run(&["verify", "--grid", "N=2..5,q=3"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("grid"));
}

#[test]
fn infeasible_construct_reports_residual() {
    let out = run(&[
        "construct", "-N", "3", "-m", "5", "-l", "2", "--delays", "2,1,0", "--type", "first",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("residual"));
}

#[test]
fn simulate_summary_text() {
    let out = run(&["simulate", "-N", "3", "-m", "5", "-l", "2", "--state", "1,5,8"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("period: 21"));
    assert!(text.contains("velocity: 20/21 (uniform)"));
    assert!(text.contains("delay type: first"));
}

#[test]
fn simulate_summary_json() {
    let out = run(&[
        "simulate", "-N", "3", "-m", "5", "-l", "2", "--state", "8,5,1", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["params"]["contours"], 3);
    assert_eq!(doc["period"], 21);
    assert_eq!(doc["velocity"], "20/21");
    assert_eq!(doc["uniform"], true);
    assert_eq!(doc["regime"], "delayed_cycle");
    assert_eq!(doc["delay_type"], "second");
}

#[test]
fn trace_lists_every_step() {
    let out = run(&[
        "simulate", "-N", "3", "-m", "2", "-l", "1", "--state", "0,0,0", "--steps", "3",
        "--trace",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("t=0   (0,0,0)"));
    assert!(text.contains("(1,1,1) moved=0,1,2"));
    assert!(text.contains("(3,3,3)"));
}

#[test]
fn trace_json_rows() {
    let out = run(&[
        "simulate", "-N", "3", "-m", "2", "-l", "1", "--state", "0,0,0", "--steps", "2",
        "--trace", "--format", "json",
    ]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["state"], serde_json::json!([0, 0, 0]));
    assert_eq!(rows[2]["state"], serde_json::json!([2, 2, 2]));
    assert_eq!(rows[2]["time"], 2);
}

#[test]
fn steps_without_trace_is_usage_error() {
    let out = run(&[
        "simulate", "-N", "3", "-m", "2", "-l", "1", "--state", "0,0,0", "--steps", "3",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn candidates_text() {
    let out = run(&["candidates", "-N", "3", "-m", "5", "-l", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "candidates N=3 m=5 l=2: 1/1, 20/21\n");
}

#[test]
fn candidates_csv() {
    let out = run(&["candidates", "-N", "3", "-m", "5", "-l", "2", "--format", "csv"]);
    assert_eq!(
        stdout(&out),
        "N,m,l,velocity\n3,5,2,1/1\n3,5,2,20/21\n"
    );
}

#[test]
fn construct_builds_reference_cycle() {
    let out = run(&[
        "construct", "-N", "3", "-m", "5", "-l", "2", "--delays", "0,1", "--type", "first",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["state"], serde_json::json!([0, 4, 7]));
    assert_eq!(doc["velocity"], "20/21");
    assert_eq!(doc["period"], 21);
    assert_eq!(doc["delay_type"], "first");
    assert_eq!(doc["verified_delay_type"], "first");
}

#[test]
fn spectrum_csv_header() {
    let out = run(&["spectrum", "-N", "3", "-m", "5", "-l", "2", "--format", "csv"]);
    assert!(stdout(&out).starts_with("N,m,l,velocity,basin_count,period,regime\n"));
}

#[test]
fn verify_csv_header_and_success() {
    let out = run(&[
        "verify", "--grid", "N=2..2,m=1..2,l=1..1", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("claim,N,m,l,verdict,detail\n"));
}

#[test]
fn verify_text_summary() {
    let out = run(&["verify", "--grid", "N=2..3,m=1..2,l=1..2m-1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("T1"));
    assert!(text.contains("S6-sufficiency"));
}

#[test]
fn spectrum_entries_round_trip_through_simulate() {
    let out = run(&["spectrum", "-N", "3", "-m", "5", "-l", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["states_examined"], 1000);
    assert_eq!(doc["admissible_count"], 970);
    let entries = doc["spectrum"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for entry in entries {
        let rep: Vec<String> = entry["representative"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap().to_string())
            .collect();
        let sim = run(&[
            "simulate", "-N", "3", "-m", "5", "-l", "2", "--state", &rep.join(","),
            "--format", "json",
        ]);
        let sim_doc: Value = serde_json::from_str(&stdout(&sim)).unwrap();
        assert_eq!(sim_doc["period"], entry["period"]);
        assert_eq!(sim_doc["velocity"], entry["velocity"]);
        assert_eq!(sim_doc["regime"], entry["regime"]);
        assert_eq!(sim_doc["transient_len"], 0);
    }
}

#[test]
fn sampled_spectrum_reports_generator() {
    let out = run(&[
        "spectrum", "-N", "4", "-m", "2", "-l", "1", "--sample", "200", "--seed", "42",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["exploration"]["mode"], "sampled");
    assert_eq!(doc["exploration"]["budget_or_count"], 200);
    assert_eq!(doc["exploration"]["seed"], 42);
    assert_eq!(doc["exploration"]["generator"], "chacha8");
}

#[test]
fn tiny_budget_asks_for_sampling() {
    let out = run(&["spectrum", "-N", "3", "-m", "5", "-l", "2", "--budget", "10"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sampled"));
}

#[test]
fn out_writes_file_and_keeps_stdout_empty() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("spectrum_352.json");
    let out = run(&[
        "spectrum", "-N", "3", "-m", "5", "-l", "2", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["admissible_count"], 970);
}
