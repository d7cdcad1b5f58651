//! Trajectory classification and simulation-side probes of the analysis.
//!
//! A trajectory tail (after discarding a transient fraction) is classified
//! by its local extrema:
//!
//! - amplitude = (mean of local maxima - mean of local minima) / 2,
//! - period = mean spacing of successive maxima,
//! - amplitude trend = least-squares slope of the per-cycle amplitudes
//!   (each maximum paired with the following minimum), normalized by the
//!   mean amplitude — i.e. relative change per cycle.
//!
//! Verdicts: `Converged` when the amplitude falls below the convergence
//! threshold, `LimitCycle` when it exceeds the cycle threshold with a flat
//! trend, `Undetermined` otherwise. A decaying-but-slow oscillation fails
//! the trend gate (its per-cycle decay is `Re(dl/dtau) (tau0 - tau)` times
//! the period), which is what separates "not converged yet" from a genuine
//! orbit at finite horizons.
//!
//! On top of the detector sit delay sweeps, an empirical-onset bisection
//! (with adaptive horizon doubling near the crossing, where decision times
//! scale like `1 / |tau - tau0|`), a log-log amplitude-scaling fit against
//! the square-root law of a supercritical branch, and a period-ordering
//! probe for the sign of T2.

use alloc::vec::Vec;

use crate::hopf::{self, HopfError, HopfPoint};
use crate::model::{self, ModelError, ModelParams, TaylorCoeffs};
use crate::normal_form::{self, BifurcationDirection, OrbitStability};
use crate::sim::{self, HistorySpec, SimConfig, SimError, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticsError {
    InvalidParameter(&'static str),
    /// Input trajectory carries error flags.
    FlaggedTrajectory,
    /// Tail too short to support either verdict rule.
    InsufficientTail,
    /// Sweep is single-verdict; no Converged-below-LimitCycle bracket.
    NoTransition,
    /// The (params, h) point is not a supercritical/stable crossing.
    NotSupercritical,
    /// A probe needed a specific verdict and the simulation disagreed.
    UnexpectedVerdict { tau: f64, verdict: CycleVerdict },
    Model(ModelError),
    Hopf(HopfError),
    Sim(SimError),
}

impl From<ModelError> for DiagnosticsError {
    fn from(e: ModelError) -> Self {
        DiagnosticsError::Model(e)
    }
}

impl From<HopfError> for DiagnosticsError {
    fn from(e: HopfError) -> Self {
        DiagnosticsError::Hopf(e)
    }
}

impl From<SimError> for DiagnosticsError {
    fn from(e: SimError) -> Self {
        DiagnosticsError::Sim(e)
    }
}

impl core::fmt::Display for DiagnosticsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DiagnosticsError::InvalidParameter(name) => write!(f, "invalid parameter: {name}"),
            DiagnosticsError::FlaggedTrajectory => write!(f, "trajectory carries error flags"),
            DiagnosticsError::InsufficientTail => write!(f, "tail too short to classify"),
            DiagnosticsError::NoTransition => write!(f, "sweep has no verdict transition"),
            DiagnosticsError::NotSupercritical => {
                write!(f, "bifurcation is not supercritical/stable here")
            }
            DiagnosticsError::UnexpectedVerdict { tau, verdict } => {
                write!(f, "unexpected verdict {verdict:?} at tau = {tau}")
            }
            DiagnosticsError::Model(e) => write!(f, "{e}"),
            DiagnosticsError::Hopf(e) => write!(f, "{e}"),
            DiagnosticsError::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DiagnosticsError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleVerdict {
    Converged,
    LimitCycle,
    Undetermined,
}

/// Classification of one trajectory tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub verdict: CycleVerdict,
    /// Half peak-to-trough of the tail.
    pub amplitude: f64,
    /// Mean spacing of successive maxima, when the tail oscillates.
    pub period: Option<f64>,
    /// Relative amplitude change per cycle (least-squares).
    pub amplitude_trend: f64,
}

/// Absolute classification thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleThresholds {
    /// Amplitudes below this count as converged.
    pub converge: f64,
    /// Amplitudes at or above this can count as a limit cycle.
    pub cycle: f64,
    /// Maximum |relative amplitude change per cycle| for a limit cycle.
    pub trend: f64,
}

impl CycleThresholds {
    /// Defaults relative to the equilibrium price: converge at 1e-4 p*,
    /// cycle at 1e-3 p*, trend 0.02 per cycle.
    pub fn relative_to(p_star: f64) -> Self {
        Self {
            converge: 1e-4 * p_star,
            cycle: 1e-3 * p_star,
            trend: 0.02,
        }
    }
}

/// Classifies a trajectory tail; see the module docs for the rules.
pub fn detect_cycle(
    traj: &Trajectory,
    transient_fraction: f64,
    thresholds: &CycleThresholds,
) -> Result<CycleReport, DiagnosticsError> {
    if !traj.flags.clear() {
        return Err(DiagnosticsError::FlaggedTrajectory);
    }
    if !(transient_fraction > 0.0 && transient_fraction < 1.0) {
        return Err(DiagnosticsError::InvalidParameter("transient_fraction"));
    }
    let start = (traj.p.len() as f64 * transient_fraction) as usize;
    let tail = &traj.p[start..];
    let tail_t = &traj.t[start..];
    if tail.len() < 8 {
        return Err(DiagnosticsError::InsufficientTail);
    }

    let mut maxima: Vec<usize> = Vec::new();
    let mut minima: Vec<usize> = Vec::new();
    for i in 1..tail.len() - 1 {
        if tail[i] > tail[i - 1] && tail[i] > tail[i + 1] {
            maxima.push(i);
        } else if tail[i] < tail[i - 1] && tail[i] < tail[i + 1] {
            minima.push(i);
        }
    }

    if maxima.len() < 6 || minima.len() < 6 {
        // near-constant rule: range of the whole tail
        let hi = tail.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lo = tail.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let amplitude = 0.5 * (hi - lo);
        if amplitude < thresholds.converge {
            return Ok(CycleReport {
                verdict: CycleVerdict::Converged,
                amplitude,
                period: None,
                amplitude_trend: 0.0,
            });
        }
        return Err(DiagnosticsError::InsufficientTail);
    }

    let mean = |idx: &[usize]| idx.iter().map(|&i| tail[i]).sum::<f64>() / idx.len() as f64;
    let amplitude = 0.5 * (mean(&maxima) - mean(&minima));
    let period =
        (tail_t[*maxima.last().unwrap()] - tail_t[maxima[0]]) / (maxima.len() - 1) as f64;

    // per-cycle amplitudes: each maximum against the following minimum
    let mut cycle_amps: Vec<f64> = Vec::with_capacity(maxima.len());
    let mut mi = 0;
    for &i in &maxima {
        while mi < minima.len() && minima[mi] <= i {
            mi += 1;
        }
        if mi >= minima.len() {
            break;
        }
        cycle_amps.push(0.5 * (tail[i] - tail[minima[mi]]));
    }
    let amplitude_trend = if cycle_amps.len() >= 3 {
        let m = cycle_amps.len() as f64;
        let mean_amp = cycle_amps.iter().sum::<f64>() / m;
        if mean_amp > 0.0 {
            let x_bar = 0.5 * (m - 1.0);
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, &a) in cycle_amps.iter().enumerate() {
                let dx = i as f64 - x_bar;
                num += dx * (a - mean_amp);
                den += dx * dx;
            }
            num / den / mean_amp
        } else {
            0.0
        }
    } else {
        0.0
    };

    let verdict = if amplitude < thresholds.converge {
        CycleVerdict::Converged
    } else if amplitude >= thresholds.cycle && libm::fabs(amplitude_trend) < thresholds.trend {
        CycleVerdict::LimitCycle
    } else {
        CycleVerdict::Undetermined
    };
    Ok(CycleReport {
        verdict,
        amplitude,
        period: Some(period),
        amplitude_trend,
    })
}

/// Simulation/detection settings shared by the sweep-style operations.
/// Thresholds are relative to the equilibrium price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub steps_per_delay: usize,
    pub duration: f64,
    pub record_stride: usize,
    /// Constant initial history at this multiple of p*.
    pub history_scale: f64,
    pub transient_fraction: f64,
    pub converge_rel: f64,
    pub cycle_rel: f64,
    pub trend_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            steps_per_delay: 40,
            duration: 2000.0,
            record_stride: 1,
            history_scale: 1.5,
            transient_fraction: 0.5,
            converge_rel: 1e-4,
            cycle_rel: 1e-3,
            trend_threshold: 0.02,
        }
    }
}

impl SweepConfig {
    fn thresholds(&self, p_star: f64) -> CycleThresholds {
        CycleThresholds {
            converge: self.converge_rel * p_star,
            cycle: self.cycle_rel * p_star,
            trend: self.trend_threshold,
        }
    }

    fn sim_config(&self, tau: f64, h: f64) -> SimConfig {
        SimConfig {
            tau,
            gain: h,
            steps_per_delay: self.steps_per_delay,
            duration: self.duration.max(10.0 * tau),
            record_stride: self.record_stride,
        }
    }
}

/// One sweep entry: the parameter value, the detector outcome (errors are
/// captured per row), and the analytic annotations when the gain admits a
/// crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub report: Result<CycleReport, DiagnosticsError>,
    pub tau0: Option<f64>,
    pub omega0: Option<f64>,
}

struct Analysis {
    p_star: f64,
    #[allow(dead_code)]
    coeffs: TaylorCoeffs,
    hopf: Option<HopfPoint>,
}

fn analyze(params: &ModelParams, h: f64) -> Result<Analysis, DiagnosticsError> {
    let eq = model::solve_equilibrium(params, 1e-10)?;
    let coeffs = model::taylor_coeffs(params, &eq, h)?;
    let hopf = hopf::hopf_point(&coeffs).ok();
    Ok(Analysis {
        p_star: eq.p_star(),
        coeffs,
        hopf,
    })
}

fn run_one(
    params: &ModelParams,
    p_star: f64,
    h: f64,
    tau: f64,
    cfg: &SweepConfig,
    thresholds: &CycleThresholds,
) -> Result<CycleReport, DiagnosticsError> {
    let history = HistorySpec::Constant(cfg.history_scale * p_star);
    let traj = sim::simulate(params, &history, &cfg.sim_config(tau, h))?;
    detect_cycle(&traj, cfg.transient_fraction, thresholds)
}

/// Simulates and classifies each delay in `tau_grid` (strictly increasing).
pub fn sweep_tau(
    params: &ModelParams,
    h: f64,
    tau_grid: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>, DiagnosticsError> {
    for w in tau_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(DiagnosticsError::InvalidParameter("tau_grid"));
        }
    }
    let analysis = analyze(params, h)?;
    let thresholds = cfg.thresholds(analysis.p_star);
    let mut rows = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        rows.push(SweepRow {
            parameter: tau,
            report: run_one(params, analysis.p_star, h, tau, cfg, &thresholds),
            tau0: analysis.hopf.as_ref().map(|hp| hp.tau0),
            omega0: analysis.hopf.as_ref().map(|hp| hp.omega0),
        });
    }
    Ok(rows)
}

/// Settings for [`empirical_onset`].
///
/// The refinement trend gate defaults tighter than the sweep default: near
/// the onset a decaying tail loses only `Re(dl/dtau) |tau - tau0| T` per
/// cycle, which slips under 0.02 well inside the bracket-width budget.
/// Horizons double until the verdict is decisive because decision times
/// grow like `1 / |tau - tau0|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnsetConfig {
    pub sweep: SweepConfig,
    pub refine_trend_threshold: f64,
    pub bracket_width: f64,
    pub max_refinements: usize,
    pub max_doublings: usize,
}

impl Default for OnsetConfig {
    fn default() -> Self {
        Self {
            sweep: SweepConfig {
                duration: 600.0,
                ..SweepConfig::default()
            },
            refine_trend_threshold: 0.004,
            bracket_width: 0.04,
            max_refinements: 12,
            max_doublings: 8,
        }
    }
}

fn adaptive_verdict(
    params: &ModelParams,
    p_star: f64,
    h: f64,
    tau: f64,
    cfg: &OnsetConfig,
) -> Result<CycleVerdict, DiagnosticsError> {
    let mut sweep = cfg.sweep;
    sweep.trend_threshold = cfg.refine_trend_threshold;
    let thresholds = sweep.thresholds(p_star);
    let mut last = CycleVerdict::Undetermined;
    for _ in 0..=cfg.max_doublings {
        match run_one(params, p_star, h, tau, &sweep, &thresholds) {
            Ok(report) => {
                last = report.verdict;
                if last != CycleVerdict::Undetermined {
                    return Ok(last);
                }
            }
            // a longer horizon may still resolve a too-short tail
            Err(DiagnosticsError::InsufficientTail) => {}
            Err(other) => return Err(other),
        }
        sweep.duration *= 2.0;
    }
    // horizon cap reached: the point is within noise of the onset itself,
    // either bracket move keeps the onset inside the width budget
    Ok(if last == CycleVerdict::Undetermined {
        CycleVerdict::LimitCycle
    } else {
        last
    })
}

/// Locates the stability/oscillation boundary from a sweep, then sharpens
/// the bracket by bisection with fresh simulations.
pub fn empirical_onset(
    params: &ModelParams,
    h: f64,
    sweep: &[SweepRow],
    cfg: &OnsetConfig,
) -> Result<f64, DiagnosticsError> {
    let first_cycle = sweep
        .iter()
        .position(|r| matches!(&r.report, Ok(rep) if rep.verdict == CycleVerdict::LimitCycle));
    let Some(hi_idx) = first_cycle else {
        return Err(DiagnosticsError::NoTransition);
    };
    let last_converged = sweep[..hi_idx]
        .iter()
        .rposition(|r| matches!(&r.report, Ok(rep) if rep.verdict == CycleVerdict::Converged));
    let Some(lo_idx) = last_converged else {
        return Err(DiagnosticsError::NoTransition);
    };

    let mut lo = sweep[lo_idx].parameter;
    let mut hi = sweep[hi_idx].parameter;
    let analysis = analyze(params, h)?;

    let mut evals = 0;
    while hi - lo >= cfg.bracket_width && evals < cfg.max_refinements {
        let mid = 0.5 * (lo + hi);
        match adaptive_verdict(params, analysis.p_star, h, mid, cfg)? {
            CycleVerdict::LimitCycle => hi = mid,
            _ => lo = mid,
        }
        evals += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Settings for [`amplitude_scaling_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig {
    pub sweep: SweepConfig,
    /// Relative offsets above the critical delay: tau = tau0 (1 + i * step).
    pub delta_step: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            sweep: SweepConfig::default(),
            delta_step: 0.02,
        }
    }
}

/// Log-log slope of tail amplitude against `tau - tau0` just past the
/// onset; a generic supercritical branch gives 1/2.
pub fn amplitude_scaling_fit(
    params: &ModelParams,
    h: f64,
    n_points: usize,
    cfg: &ScalingConfig,
) -> Result<f64, DiagnosticsError> {
    if n_points < 3 {
        return Err(DiagnosticsError::InvalidParameter("n_points"));
    }
    if !(cfg.delta_step > 0.0) {
        return Err(DiagnosticsError::InvalidParameter("delta_step"));
    }
    let analysis = analyze(params, h)?;
    let hp = analysis
        .hopf
        .ok_or(DiagnosticsError::NotSupercritical)?;
    let slope = hopf::transversality(&analysis.coeffs, &hp);
    let nf = normal_form::evaluate(&analysis.coeffs, &hp, &slope)
        .map_err(|_| DiagnosticsError::NotSupercritical)?;
    let cls = normal_form::classify(&nf).map_err(|_| DiagnosticsError::NotSupercritical)?;
    if cls.direction != BifurcationDirection::Supercritical
        || cls.orbit_stability != OrbitStability::Stable
    {
        return Err(DiagnosticsError::NotSupercritical);
    }

    let thresholds = cfg.sweep.thresholds(analysis.p_star);
    let mut xs = Vec::with_capacity(n_points);
    let mut ys = Vec::with_capacity(n_points);
    for i in 1..=n_points {
        let tau = hp.tau0 * (1.0 + cfg.delta_step * i as f64);
        let report = run_one(params, analysis.p_star, h, tau, &cfg.sweep, &thresholds)?;
        if report.verdict != CycleVerdict::LimitCycle {
            return Err(DiagnosticsError::UnexpectedVerdict {
                tau,
                verdict: report.verdict,
            });
        }
        xs.push(libm::log(tau - hp.tau0));
        ys.push(libm::log(report.amplitude));
    }
    let n = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / n;
    let y_bar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - x_bar) * (y - y_bar);
        den += (x - x_bar) * (x - x_bar);
    }
    Ok(num / den)
}

/// Measured periods at two delays past the onset, ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodTrendOutcome {
    pub tau_small: f64,
    pub tau_large: f64,
    pub period_small: f64,
    pub period_large: f64,
    /// Period at the larger delay exceeds the period at the smaller one.
    pub increasing: bool,
}

/// Compares measured orbit periods at two supercritical delays, for the
/// sign of T2.
pub fn period_trend_check(
    params: &ModelParams,
    h: f64,
    tau_pair: (f64, f64),
    cfg: &SweepConfig,
) -> Result<PeriodTrendOutcome, DiagnosticsError> {
    if tau_pair.0 == tau_pair.1 {
        return Err(DiagnosticsError::InvalidParameter("tau_pair"));
    }
    let (tau_small, tau_large) = if tau_pair.0 < tau_pair.1 {
        (tau_pair.0, tau_pair.1)
    } else {
        (tau_pair.1, tau_pair.0)
    };
    let analysis = analyze(params, h)?;
    if let Some(hp) = &analysis.hopf {
        if tau_small <= hp.tau0 {
            return Err(DiagnosticsError::InvalidParameter(
                "both delays must exceed tau0",
            ));
        }
    }
    let thresholds = cfg.thresholds(analysis.p_star);
    let mut periods = [0.0; 2];
    for (slot, tau) in [tau_small, tau_large].into_iter().enumerate() {
        let report = run_one(params, analysis.p_star, h, tau, cfg, &thresholds)?;
        let (CycleVerdict::LimitCycle, Some(period)) = (report.verdict, report.period) else {
            return Err(DiagnosticsError::UnexpectedVerdict {
                tau,
                verdict: report.verdict,
            });
        };
        periods[slot] = period;
    }
    Ok(PeriodTrendOutcome {
        tau_small,
        tau_large,
        period_small: periods[0],
        period_large: periods[1],
        increasing: periods[1] > periods[0],
    })
}
