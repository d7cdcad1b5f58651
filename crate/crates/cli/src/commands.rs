//! The six subcommands and the argument/override plumbing.

use std::io::Write;

use nethopf_core::diagnostics::{self, CycleReport, DiagnosticsError};
use nethopf_core::hopf;
use nethopf_core::model::{solve_equilibrium, taylor_coeffs};
use nethopf_core::normal_form;
use nethopf_core::sim::{simulate, HistorySpec};
use nethopf_core::Complex64;

use crate::config::RunConfig;
use crate::output::{fmt_sig, timestamp_line, Sink};
use crate::verify::{run_battery, VerifyOptions};
use crate::CliError;

pub const USAGE: &str = "\
nethopf — Hopf bifurcation analysis and delayed-feedback control of the
dual congestion-control fluid model

usage: nethopf <command> [--config <file>] [--<section.key>=<value>]...

commands:
  analyze       critical delay, normal form and classification at (h)
  simulate      integrate the delay equation at (h, tau), emit t,p,p_delayed CSV
  sweep-tau     classify trajectories over a delay grid, emit CSV
  sweep-gain    analytic (omega0, tau0) over a gain grid, emit CSV
  design-gain   find h whose critical delay matches control.tau_target
  verify        run the cross-validation battery, report pass/fail

Config keys (defaults in parentheses) — file lines `section.key = value`,
same keys accepted as command-line overrides:
  model.k (0.01)  model.c (50)  model.demand (proportional-fair)  model.weight (1)
  control.h (0)  control.tau (3.0)  control.tau_target (unset)
  sim.steps_per_delay (40)  sim.duration (2000)  sim.history_scale (1.5)
  sim.record_stride (1)
  detect.transient_fraction (0.5)  detect.converge_rel (1e-4)
  detect.cycle_rel (1e-3)  detect.trend_threshold (0.02)
  sweep.start (3.0)  sweep.stop (3.4)  sweep.count (3)
  output.path (stdout)  output.precision (17)  output.timestamp (false)

exit codes: 0 success, 2 config error, 3 infeasible, 4 numerical failure
";

/// Parses the command line and dispatches. `args` excludes the binary name.
pub fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Config(format!("missing command\n\n{USAGE}")));
    };
    if command == "--help" || command == "-h" || command == "help" {
        print!("{USAGE}");
        return Ok(());
    }

    let mut cfg = RunConfig::default();
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut config_path: Option<String> = None;
    let mut rest = args[1..].iter();
    while let Some(arg) = rest.next() {
        if arg == "--config" {
            let path = rest
                .next()
                .ok_or_else(|| CliError::Config("--config needs a path".into()))?;
            config_path = Some(path.clone());
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config_path = Some(path.to_string());
        } else if let Some(kv) = arg.strip_prefix("--") {
            let Some((key, value)) = kv.split_once('=') else {
                return Err(CliError::Config(format!(
                    "expected --section.key=value, got `{arg}`"
                )));
            };
            overrides.push((key.to_string(), value.to_string()));
        } else {
            return Err(CliError::Config(format!("unexpected argument `{arg}`")));
        }
    }
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
        cfg = RunConfig::parse(&text)?;
    }
    for (key, value) in &overrides {
        cfg.set(key, value)?;
    }

    match command.as_str() {
        "analyze" => cmd_analyze(&cfg),
        "simulate" => cmd_simulate(&cfg),
        "sweep-tau" => cmd_sweep_tau(&cfg),
        "sweep-gain" => cmd_sweep_gain(&cfg),
        "design-gain" => cmd_design_gain(&cfg),
        "verify" => cmd_verify(&cfg),
        other => Err(CliError::Config(format!(
            "unknown command `{other}`\n\n{USAGE}"
        ))),
    }
}

fn fmt_c(z: Complex64, sig: usize) -> String {
    format!("{} {} {}i", fmt_sig(z.re, sig), if z.im < 0.0 { "-" } else { "+" }, fmt_sig(z.im.abs(), sig))
}

/// Full analysis report: equilibrium, gain range, critical point,
/// transversality, normal form and classification.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let eq = solve_equilibrium(&params, 1e-10)?;
    let coeffs = taylor_coeffs(&params, &eq, cfg.h)?;
    let range = hopf::feasible_gain_range(coeffs.b)?;
    let hp = hopf::hopf_point(&coeffs)?;
    let slope = hopf::transversality(&coeffs, &hp);
    let nf = normal_form::evaluate(&coeffs, &hp, &slope)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let cls = normal_form::classify(&nf).map_err(|e| CliError::Numerical(e.to_string()))?;

    let p = cfg.precision;
    let mut lines = vec![
        format!("p_star = {}", fmt_sig(eq.p_star(), p)),
        format!("b = {}", fmt_sig(coeffs.b, p)),
        format!("b2 = {}", fmt_sig(coeffs.b2, p)),
        format!("h = {}", fmt_sig(cfg.h, p)),
        format!(
            "gain_range = [{}, 0)",
            fmt_sig(range.lower, p)
        ),
        format!("omega0 = {}", fmt_sig(hp.omega0, p)),
        format!("tau0 = {}", fmt_sig(hp.tau0, p)),
        format!("dlambda_dtau = {}", fmt_c(slope.value, p)),
        format!("B = {}", fmt_c(nf.normalization, p)),
        format!("g20 = {}", fmt_c(nf.g20, p)),
        format!("g11 = {}", fmt_c(nf.g11, p)),
        format!("g02 = {}", fmt_c(nf.g02, p)),
        format!("g21 = {}", fmt_c(nf.g21, p)),
        format!("E1 = {}", fmt_c(nf.e1, p)),
        format!("E2 = {}", fmt_c(nf.e2, p)),
        format!("C1 = {}", fmt_c(nf.c1, p)),
        format!("mu2 = {}", fmt_sig(nf.mu2, p)),
        format!("beta2 = {}", fmt_sig(nf.beta2, p)),
        format!("T2 = {}", fmt_sig(nf.t2, p)),
        format!("classification = {cls}"),
    ];
    if let Some(ts) = timestamp_line(cfg.timestamp) {
        lines.insert(0, ts);
    }
    for line in &lines {
        println!("{line}");
    }

    if let Some(path) = &cfg.output_path {
        let mut sink = Sink::file(path)?;
        if let Some(ts) = timestamp_line(cfg.timestamp) {
            writeln!(sink, "{ts}")?;
        }
        writeln!(sink, "quantity,value")?;
        let scalars: [(&str, f64); 10] = [
            ("p_star", eq.p_star()),
            ("b", coeffs.b),
            ("b2", coeffs.b2),
            ("gain_lower", range.lower),
            ("omega0", hp.omega0),
            ("tau0", hp.tau0),
            ("mu2", nf.mu2),
            ("beta2", nf.beta2),
            ("T2", nf.t2),
            ("h", cfg.h),
        ];
        for (name, value) in scalars {
            writeln!(sink, "{name},{}", fmt_sig(value, p))?;
        }
        let complexes: [(&str, Complex64); 8] = [
            ("dlambda_dtau", slope.value),
            ("B", nf.normalization),
            ("g20", nf.g20),
            ("g11", nf.g11),
            ("g02", nf.g02),
            ("g21", nf.g21),
            ("E1", nf.e1),
            ("E2", nf.e2),
        ];
        for (name, z) in complexes {
            writeln!(sink, "{name}_re,{}", fmt_sig(z.re, p))?;
            writeln!(sink, "{name}_im,{}", fmt_sig(z.im, p))?;
        }
        writeln!(sink, "# classification = {cls}")?;
        sink.flush()?;
    }
    Ok(())
}

fn detect_for(cfg: &RunConfig, p_star: f64, traj: &nethopf_core::sim::Trajectory) -> Result<CycleReport, DiagnosticsError> {
    let thresholds = nethopf_core::diagnostics::CycleThresholds {
        converge: cfg.converge_rel * p_star,
        cycle: cfg.cycle_rel * p_star,
        trend: cfg.trend_threshold,
    };
    diagnostics::detect_cycle(traj, cfg.transient_fraction, &thresholds)
}

/// Integrates at (control.h, control.tau) and writes `t,p,p_delayed` CSV
/// with a cycle-verdict footer.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let p_star = solve_equilibrium(&params, 1e-10)?.p_star();
    let history = HistorySpec::Constant(cfg.history_scale * p_star);
    let traj = simulate(&params, &history, &cfg.sim_config(cfg.tau))?;

    let mut sink = match &cfg.output_path {
        Some(path) => Sink::file(path)?,
        None => Sink::stdout(),
    };
    if let Some(ts) = timestamp_line(cfg.timestamp) {
        writeln!(sink, "{ts}")?;
    }
    writeln!(sink, "# tau = {}", fmt_sig(cfg.tau, cfg.precision))?;
    writeln!(sink, "# h = {}", fmt_sig(cfg.h, cfg.precision))?;
    writeln!(sink, "t,p,p_delayed")?;
    for i in 0..traj.t.len() {
        writeln!(
            sink,
            "{},{},{}",
            fmt_sig(traj.t[i], cfg.precision),
            fmt_sig(traj.p[i], cfg.precision),
            fmt_sig(traj.p_delayed[i], cfg.precision)
        )?;
    }
    match detect_for(cfg, p_star, &traj) {
        Ok(report) => {
            writeln!(sink, "# verdict = {:?}", report.verdict)?;
            writeln!(sink, "# amplitude = {}", fmt_sig(report.amplitude, cfg.precision))?;
            if let Some(period) = report.period {
                writeln!(sink, "# period = {}", fmt_sig(period, cfg.precision))?;
            }
        }
        Err(e) => writeln!(sink, "# verdict = ERROR ({e})")?,
    }
    sink.flush()?;

    if traj.flags.nonfinite {
        return Err(CliError::Numerical(
            "trajectory became non-finite; partial series written".into(),
        ));
    }
    Ok(())
}

/// Sweeps the delay grid and writes `tau,verdict,amplitude,period` CSV.
/// Per-row failures become ERROR rows; the sweep itself still succeeds.
pub fn cmd_sweep_tau(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let grid = cfg.sweep_grid()?;
    let rows = diagnostics::sweep_tau(&params, cfg.h, &grid, &cfg.sweep_config())?;

    let mut sink = match &cfg.output_path {
        Some(path) => Sink::file(path)?,
        None => Sink::stdout(),
    };
    if let Some(ts) = timestamp_line(cfg.timestamp) {
        writeln!(sink, "{ts}")?;
    }
    writeln!(sink, "# h = {}", fmt_sig(cfg.h, cfg.precision))?;
    if let Some(row) = rows.first() {
        if let (Some(tau0), Some(omega0)) = (row.tau0, row.omega0) {
            writeln!(sink, "# tau0 = {}", fmt_sig(tau0, cfg.precision))?;
            writeln!(sink, "# omega0 = {}", fmt_sig(omega0, cfg.precision))?;
        }
    }
    writeln!(sink, "tau,verdict,amplitude,period")?;
    for row in &rows {
        match &row.report {
            Ok(report) => {
                let period = report
                    .period
                    .map(|p| fmt_sig(p, cfg.precision))
                    .unwrap_or_default();
                writeln!(
                    sink,
                    "{},{:?},{},{}",
                    fmt_sig(row.parameter, cfg.precision),
                    report.verdict,
                    fmt_sig(report.amplitude, cfg.precision),
                    period
                )?;
            }
            Err(e) => {
                writeln!(sink, "{},ERROR,,", fmt_sig(row.parameter, cfg.precision))?;
                eprintln!("tau = {}: {e}", row.parameter);
            }
        }
    }
    sink.flush()?;
    Ok(())
}

/// Analytic `tau0(h)` over the gain grid: CSV `h,omega0,tau0`.
/// Any infeasible grid point is listed and the command exits 3.
pub fn cmd_sweep_gain(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let eq = solve_equilibrium(&params, 1e-10)?;
    let b = taylor_coeffs(&params, &eq, 0.0)?.b;
    let grid = cfg.sweep_grid()?;

    let mut infeasible = Vec::new();
    for (i, &h) in grid.iter().enumerate() {
        if let Err(e) = hopf::hopf_point_from_gain(b, h) {
            infeasible.push(format!("grid point {i} (h = {h}): {e}"));
        }
    }
    if !infeasible.is_empty() {
        for line in &infeasible {
            eprintln!("{line}");
        }
        return Err(CliError::Infeasible(format!(
            "{} infeasible gain grid point(s)",
            infeasible.len()
        )));
    }

    let rows = hopf::tau0_vs_h(b, &grid)?;
    let mut sink = match &cfg.output_path {
        Some(path) => Sink::file(path)?,
        None => Sink::stdout(),
    };
    if let Some(ts) = timestamp_line(cfg.timestamp) {
        writeln!(sink, "{ts}")?;
    }
    writeln!(sink, "# b = {}", fmt_sig(b, cfg.precision))?;
    writeln!(sink, "h,omega0,tau0")?;
    for (h, hp) in rows {
        writeln!(
            sink,
            "{},{},{}",
            fmt_sig(h, cfg.precision),
            fmt_sig(hp.omega0, cfg.precision),
            fmt_sig(hp.tau0, cfg.precision)
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Finds the gain whose critical delay matches `control.tau_target`.
pub fn cmd_design_gain(cfg: &RunConfig) -> Result<(), CliError> {
    let Some(target) = cfg.tau_target else {
        return Err(CliError::Config(
            "design-gain needs control.tau_target".into(),
        ));
    };
    let params = cfg.model_params()?;
    let eq = solve_equilibrium(&params, 1e-10)?;
    let b = taylor_coeffs(&params, &eq, 0.0)?.b;
    let range = hopf::feasible_gain_range(b)?;
    let h = hopf::design_gain(b, target, 1e-9)?;
    let achieved = hopf::hopf_point_from_gain(b, h)?;

    let p = cfg.precision;
    println!("tau_target = {}", fmt_sig(target, p));
    println!("b = {}", fmt_sig(b, p));
    println!("gain_range = [{}, 0)", fmt_sig(range.lower, p));
    println!("h = {}", fmt_sig(h, p));
    println!("tau0_achieved = {}", fmt_sig(achieved.tau0, p));
    println!("omega0 = {}", fmt_sig(achieved.omega0, p));
    Ok(())
}

/// Runs the verification battery; exit 0 iff every check passes.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let params = cfg.model_params()?;
    let results = run_battery(
        &params,
        cfg.h,
        &cfg.sweep_config(),
        &cfg.onset_config(),
        &VerifyOptions::default(),
    )?;
    let mut failures = 0;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} of {} checks failed",
            results.len()
        )));
    }
    println!("all {} checks passed", results.len());
    Ok(())
}
