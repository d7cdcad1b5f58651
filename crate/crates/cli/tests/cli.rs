//! End-to-end checks of the command-line surface: exit codes, CSV dialect
//! round-trips, config/override precedence, determinism.

// 3.1416 is the five-digit reference value for tau0, not a sloppy pi
#![allow(clippy::approx_constant)]

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use nethopf::output::parse_csv;
use nethopf::verify::{run_battery, VerifyOptions};
use nethopf_core::diagnostics::{OnsetConfig, SweepConfig};
use nethopf_core::model::{DemandFunction, ModelParams};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nethopf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nethopf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nethopf-cli-tests-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// First numeric value on the `key = value` report line.
fn report_value(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("report has no `{key}` line:\n{report}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap_or_else(|_| panic!("`{key}` line is not numeric"))
}

#[test]
fn help_and_usage_errors() {
    assert!(run(&["--help"]).status.success());
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--no.such.key=1"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--config", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn analyze_reference_report() {
    let out = run(&["analyze"]);
    assert!(out.status.success());
    let report = stdout(&out);
    assert!((report_value(&report, "tau0") - 3.1416).abs() < 1e-3);
    assert!((report_value(&report, "omega0") - 0.5).abs() < 1e-10);
    assert!((report_value(&report, "mu2") - 5259.2).abs() < 0.01 * 5259.2);
    assert!(report.contains("supercritical"));

    let out = run(&["analyze", "--control.h=-0.1"]);
    assert!(out.status.success());
    let report = stdout(&out);
    assert!((report_value(&report, "tau0") - 4.7082).abs() < 1e-3);
}

#[test]
fn analyze_csv_output_round_trips() {
    let path = scratch("analyze.csv");
    let out = run(&["analyze", &format!("--output.path={}", path.display())]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.header, vec!["quantity", "value"]);
    let lookup = |name: &str| {
        table
            .raw_rows
            .iter()
            .find(|r| r[0] == name)
            .unwrap_or_else(|| panic!("missing {name}"))[1]
            .parse::<f64>()
            .unwrap()
    };
    assert_eq!(lookup("p_star"), 0.02);
    assert_eq!(lookup("b"), -0.5);
    assert!((lookup("tau0") - std::f64::consts::PI).abs() < 1e-12);
    assert!((lookup("mu2") - 5259.2177).abs() < 1e-3);
    assert!(table.comments.iter().any(|c| c.contains("supercritical")));
}

#[test]
fn analyze_rejects_positive_gain_with_exit_3() {
    let out = run(&["analyze", "--control.h=0.1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn config_file_loads_and_overrides_win() {
    let path = scratch("override.conf");
    fs::write(
        &path,
        "# test config\ncontrol.h = -0.1\ncontrol.tau = 3.4\noutput.precision = 8\n",
    )
    .unwrap();
    let out = run(&["analyze", "--config", path.to_str().unwrap(), "--control.h=0"]);
    assert!(out.status.success());
    let report = stdout(&out);
    assert_eq!(report_value(&report, "h"), 0.0);
    assert!((report_value(&report, "tau0") - 3.1416).abs() < 1e-3);

    let bad = scratch("bad.conf");
    fs::write(&bad, "model.k = 0.01\nmodel.oops = 1\n").unwrap();
    assert_eq!(run(&["analyze", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn simulate_csv_round_trip_and_verdicts() {
    let path = scratch("sim-lc.csv");
    let out = run(&[
        "simulate",
        "--control.h=0",
        "--control.tau=3.4",
        "--sim.duration=600",
        "--sim.record_stride=2",
        &format!("--output.path={}", path.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.header, vec!["t", "p", "p_delayed"]);
    assert!(table.comments.iter().any(|c| c == "verdict = LimitCycle"));
    // uniform time grid, all numeric
    let dt = table.rows[1][0].unwrap() - table.rows[0][0].unwrap();
    for w in table.rows.windows(2) {
        assert!((w[1][0].unwrap() - w[0][0].unwrap() - dt).abs() < 1e-9);
        assert!(w[0][1].unwrap().is_finite());
    }
    // the delayed column is the price column shifted by exactly tau
    let lag = (3.4 / dt).round() as usize;
    for i in lag..table.rows.len() {
        assert_eq!(table.rows[i][2], table.rows[i - lag][1]);
    }

    // the same delay that oscillates uncontrolled converges under h = -0.1
    let path2 = scratch("sim-conv.csv");
    let out = run(&[
        "simulate",
        "--control.h=-0.1",
        "--control.tau=3.4",
        "--sim.duration=600",
        &format!("--output.path={}", path2.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path2).unwrap()).unwrap();
    assert!(table.comments.iter().any(|c| c == "verdict = Converged"));
}

#[test]
fn simulate_from_equilibrium_history_is_flat() {
    let path = scratch("sim-eq.csv");
    let out = run(&[
        "simulate",
        "--sim.history_scale=1",
        "--control.tau=3.0",
        "--sim.duration=60",
        &format!("--output.path={}", path.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    for row in &table.rows {
        assert!((row[1].unwrap() - 0.02).abs() < 1e-10);
    }
}

#[test]
fn simulate_nonfinite_exits_4() {
    let out = run(&[
        "simulate",
        "--control.h=5",
        "--control.tau=1",
        "--sim.duration=400",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic_without_timestamp() {
    let (a, b) = (scratch("det-a.csv"), scratch("det-b.csv"));
    for path in [&a, &b] {
        let out = run(&[
            "simulate",
            "--control.tau=3.2",
            "--sim.duration=200",
            &format!("--output.path={}", path.display()),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let ts = scratch("det-ts.csv");
    let out = run(&[
        "simulate",
        "--control.tau=3.2",
        "--sim.duration=200",
        "--output.timestamp=true",
        &format!("--output.path={}", ts.display()),
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&ts).unwrap().starts_with("# generated = "));
}

#[test]
fn sweep_tau_reproduces_figure_verdicts() {
    let path = scratch("sweep-tau.csv");
    let out = run(&[
        "sweep-tau",
        "--sweep.start=3.0",
        "--sweep.stop=3.4",
        "--sweep.count=3",
        "--sim.duration=2500",
        "--sim.record_stride=2",
        &format!("--output.path={}", path.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.header, vec!["tau", "verdict", "amplitude", "period"]);
    let verdicts: Vec<&str> = table.raw_rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(verdicts, vec!["Converged", "LimitCycle", "LimitCycle"]);
    assert!(table.comments.iter().any(|c| c.starts_with("tau0 = 3.1415926")));
}

#[test]
fn sweep_tau_error_rows_do_not_fail_the_command() {
    // stride so coarse the tail cannot be classified: rows become ERROR
    let path = scratch("sweep-err.csv");
    let out = run(&[
        "sweep-tau",
        "--sweep.start=3.0",
        "--sweep.stop=3.2",
        "--sweep.count=2",
        "--sim.duration=30",
        "--sim.record_stride=100",
        &format!("--output.path={}", path.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    for row in &table.raw_rows {
        assert_eq!(row[1], "ERROR");
    }
}

#[test]
fn sweep_gain_matches_reported_critical_delays() {
    let path = scratch("sweep-gain.csv");
    let out = run(&[
        "sweep-gain",
        "--sweep.start=-0.15",
        "--sweep.stop=0",
        "--sweep.count=4",
        &format!("--output.path={}", path.display()),
    ]);
    assert!(out.status.success());
    let table = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(table.header, vec!["h", "omega0", "tau0"]);
    let tau0: Vec<f64> = table.rows.iter().map(|r| r[2].unwrap()).collect();
    assert!((tau0[0] - 6.3679).abs() < 1e-3);
    assert!((tau0[1] - 4.7082).abs() < 1e-3);
    assert!((tau0[3] - 3.1416).abs() < 1e-3);
}

#[test]
fn sweep_gain_rejects_infeasible_grid_with_exit_3() {
    // h = -0.25 = b/2 exactly: omega0 degenerates
    let out = run(&[
        "sweep-gain",
        "--sweep.start=-0.25",
        "--sweep.stop=0",
        "--sweep.count=2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid point 0"));
}

#[test]
fn design_gain_reports_and_errors() {
    let out = run(&["design-gain", "--control.tau_target=6.3679"]);
    assert!(out.status.success());
    let report = stdout(&out);
    assert!((report_value(&report, "h") - -0.15).abs() < 1e-4);
    assert!((report_value(&report, "tau0_achieved") - 6.3679).abs() < 1e-6);

    // missing target is a config error; target below -pi/(2b) is infeasible
    assert_eq!(run(&["design-gain"]).status.code(), Some(2));
    assert_eq!(
        run(&["design-gain", "--control.tau_target=3.0"]).status.code(),
        Some(3)
    );
}

#[test]
fn verify_passes_at_reference_and_skips_infeasible_gain() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&out);
    assert_eq!(report.matches("PASS").count(), 5);
    assert!(!report.contains("FAIL"));

    let out = run(&["verify", "--control.h=0.2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_negative_control_catches_corrupted_b2() {
    let params =
        ModelParams::new(0.01, 50.0, DemandFunction::proportional_fair(1.0).unwrap()).unwrap();
    let results = run_battery(
        &params,
        0.0,
        &SweepConfig::default(),
        &OnsetConfig::default(),
        &VerifyOptions { b2_corruption: 0.05 },
    )
    .unwrap();
    let agreement = results
        .iter()
        .find(|r| r.name == "root-formula-agreement")
        .unwrap();
    assert!(!agreement.passed, "corrupted b2 must not pass: {agreement:?}");
}
