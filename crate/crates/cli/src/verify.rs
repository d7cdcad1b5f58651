//! Cross-module verification battery: each check pits one computation
//! route against an independent one.

use nethopf_core::diagnostics::{empirical_onset, sweep_tau, CycleVerdict, OnsetConfig, SweepConfig};
use nethopf_core::hopf::{
    find_rightmost_root, hopf_point, transversality, HopfError, RootSearch,
};
use nethopf_core::model::{solve_equilibrium, taylor_coeffs, ModelParams, TaylorCoeffs};
use nethopf_core::normal_form::{self, BifurcationDirection, OrbitStability};

use crate::CliError;

/// Test hooks for negative controls.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Offset added to b2 before the characteristic-root checks; a nonzero
    /// value must make the root/formula agreement check fail.
    pub b2_corruption: f64,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String), CliError>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult {
            name,
            passed,
            detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Runs the battery at `(params, h)`.
///
/// Errors with an infeasibility (exit 3) before running anything when the
/// gain admits no Hopf crossing; individual check failures are reported in
/// the results instead of erroring.
pub fn run_battery(
    params: &ModelParams,
    h: f64,
    sweep_cfg: &SweepConfig,
    onset_cfg: &OnsetConfig,
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>, CliError> {
    let eq = solve_equilibrium(params, 1e-10)?;
    let coeffs = taylor_coeffs(params, &eq, h)?;
    let hp = hopf_point(&coeffs).map_err(|e| match e {
        HopfError::GainOutOfRange { .. } | HopfError::DegenerateFrequency => {
            CliError::Infeasible(format!("battery skipped: {e}"))
        }
        other => other.into(),
    })?;
    let slope = transversality(&coeffs, &hp);

    let probed = TaylorCoeffs {
        b2: coeffs.b2 + opts.b2_corruption,
        ..coeffs
    };
    let search = RootSearch::default();
    let mut results = Vec::new();

    results.push(check("root-formula-agreement", {
        find_rightmost_root(&probed, hp.tau0, &search)
            .map_err(CliError::from)
            .map(|root| {
                let re_err = root.lambda.re.abs();
                let im_err = (root.lambda.im - hp.omega0).abs();
                (
                    re_err < 1e-7 && im_err < 1e-7,
                    format!("|Re| = {re_err:.2e}, |Im - omega0| = {im_err:.2e} at tau0"),
                )
            })
    }));

    results.push(check("root-sign-change", {
        let below = find_rightmost_root(&probed, 0.9 * hp.tau0, &search).map_err(CliError::from);
        let above = find_rightmost_root(&probed, 1.1 * hp.tau0, &search).map_err(CliError::from);
        match (below, above) {
            (Ok(b), Ok(a)) => Ok((
                b.lambda.re < 0.0 && a.lambda.re > 0.0,
                format!(
                    "Re = {:.3e} at 0.9 tau0, {:.3e} at 1.1 tau0",
                    b.lambda.re, a.lambda.re
                ),
            )),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }));

    results.push(check("transversality-finite-difference", {
        let step = 1e-4 * hp.tau0;
        let plus = find_rightmost_root(&probed, hp.tau0 + step, &search).map_err(CliError::from);
        let minus = find_rightmost_root(&probed, hp.tau0 - step, &search).map_err(CliError::from);
        match (plus, minus) {
            (Ok(p), Ok(m)) => {
                let fd = (p.lambda.re - m.lambda.re) / (2.0 * step);
                let rel = (fd - slope.re()).abs() / slope.re().abs();
                Ok((
                    rel <= 1e-3,
                    format!("fd = {fd:.6e}, closed form = {:.6e}, rel = {rel:.2e}", slope.re()),
                ))
            }
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }));

    // one sweep feeds both the onset and the classification checks
    let grid = [0.9 * hp.tau0, 1.1 * hp.tau0];
    let rows = sweep_tau(params, h, &grid, sweep_cfg).map_err(CliError::from);

    results.push(check("empirical-onset", {
        rows.as_ref()
            .map_err(|e| CliError::Numerical(e.to_string()))
            .and_then(|rows| {
                let onset =
                    empirical_onset(params, h, rows, onset_cfg).map_err(CliError::from)?;
                let err = (onset - hp.tau0).abs();
                Ok((
                    err < 0.05,
                    format!("onset = {onset:.4}, tau0 = {:.4}, |diff| = {err:.4}", hp.tau0),
                ))
            })
    }));

    results.push(check("classification-vs-simulation", {
        let nf = normal_form::evaluate(&coeffs, &hp, &slope)
            .map_err(|e| CliError::Numerical(e.to_string()));
        match (nf, rows.as_ref()) {
            (Ok(nf), Ok(rows)) => {
                let cls = normal_form::classify(&nf)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                let supercritical_stable = cls.direction == BifurcationDirection::Supercritical
                    && cls.orbit_stability == OrbitStability::Stable;
                let verdicts: Vec<_> = rows
                    .iter()
                    .map(|r| r.report.as_ref().map(|rep| rep.verdict).ok())
                    .collect();
                let behaves = verdicts
                    == vec![Some(CycleVerdict::Converged), Some(CycleVerdict::LimitCycle)];
                Ok((
                    supercritical_stable && behaves,
                    format!("classified ({cls}); verdicts below/above tau0: {verdicts:?}"),
                ))
            }
            (Err(e), _) => Err(e),
            (_, Err(e)) => Err(CliError::Numerical(e.to_string())),
        }
    }));

    Ok(results)
}
