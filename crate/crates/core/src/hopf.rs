//! Hopf critical point, feasible gain range, transversality and
//! characteristic roots of the linearized controlled model.
//!
//! The linearization `u'(t) = h u(t) + b2 u(t - tau)` has characteristic
//! equation
//!
//! ```text
//! lambda - h - b2 exp(-lambda tau) = 0
//! ```
//!
//! Purely imaginary roots `+-i omega` require
//!
//! ```text
//! omega0 = sqrt(b2^2 - h^2),
//! tau0   = arccos(-h / b2) / omega0          (principal branch)
//! ```
//!
//! which is real only for gains in `[b/2, 0]` (with `b = b2 + h < 0`); the
//! equilibrium is asymptotically stable for `tau < tau0` and sheds a
//! periodic orbit as `tau` crosses `tau0`. The crossing speed is
//!
//! ```text
//! Re(dl/dtau)|tau0 = omega0^2 / ((1 - h tau0)^2 + (omega0 tau0)^2) > 0
//! Im(dl/dtau)|tau0 = omega0 (h - b2^2 tau0) / ((1 - h tau0)^2 + (omega0 tau0)^2)
//! ```
//!
//! [`find_rightmost_root`] verifies the stability boundary numerically with
//! a grid-seeded damped Newton iteration on the characteristic function.

use alloc::boxed::Box;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::model::TaylorCoeffs;

#[derive(Debug, Clone, PartialEq)]
pub enum HopfError {
    /// `b >= 0`: the model linearization is not of the decreasing-demand form.
    InvalidModel,
    /// Gain outside `[b/2, 0]`.
    GainOutOfRange { h: f64, lower: f64 },
    /// `b2^2 - h^2 <= 0`: no positive crossing frequency (h at the range edge).
    DegenerateFrequency,
    /// No Newton start point converged; the search box is misconfigured.
    NoRootFound,
    /// Requested delay below the uncontrolled critical delay -pi/(2b).
    TargetTooSmall { min_tau0: f64 },
    /// A monotone bisection bracket could not be established or held.
    BracketFailure,
    /// Argument outside its domain.
    InvalidParameter(&'static str),
    /// Failure at one point of a gain grid.
    AtGrid { index: usize, cause: Box<HopfError> },
}

impl core::fmt::Display for HopfError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HopfError::InvalidModel => write!(f, "model requires b < 0"),
            HopfError::GainOutOfRange { h, lower } => {
                write!(f, "gain {h} outside feasible range [{lower}, 0]")
            }
            HopfError::DegenerateFrequency => {
                write!(f, "b2^2 - h^2 <= 0: crossing frequency degenerates")
            }
            HopfError::NoRootFound => write!(f, "characteristic root search found no root"),
            HopfError::TargetTooSmall { min_tau0 } => {
                write!(f, "target delay below uncontrolled critical delay {min_tau0}")
            }
            HopfError::BracketFailure => write!(f, "bisection bracket failure"),
            HopfError::InvalidParameter(name) => write!(f, "invalid parameter: {name}"),
            HopfError::AtGrid { index, cause } => {
                write!(f, "grid point {index}: {cause}")
            }
        }
    }
}

impl core::error::Error for HopfError {}

/// Feedback gains for which a Hopf crossing exists: `[b/2, 0)`.
///
/// The upper end is exclusive as a *control design* range (the controller
/// must act); `h = 0` itself is the uncontrolled system and remains a valid
/// input to [`hopf_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRange {
    /// `b/2`, inclusive.
    pub lower: f64,
    /// `0`, exclusive.
    pub upper: f64,
}

impl GainRange {
    pub fn contains(&self, h: f64) -> bool {
        h >= self.lower && h < self.upper
    }
}

/// Critical frequency and delay of the Hopf crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    /// Crossing frequency `omega0 > 0` (rad per time unit).
    pub omega0: f64,
    /// Critical delay `tau0 > 0` (time units).
    pub tau0: f64,
}

/// A root of the characteristic equation with its defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoot {
    pub lambda: Complex64,
    /// `|lambda - h - b2 exp(-lambda tau)|`.
    pub residual: f64,
}

/// `d lambda / d tau` evaluated at the crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalitySlope {
    pub value: Complex64,
}

impl TransversalitySlope {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

/// Gains for which `b2^2 - h^2 >= 0` and `h <= 0`: the interval `[b/2, 0)`.
pub fn feasible_gain_range(b: f64) -> Result<GainRange, HopfError> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(HopfError::InvalidModel);
    }
    Ok(GainRange {
        lower: 0.5 * b,
        upper: 0.0,
    })
}

/// Critical point for raw `(b, h)`; the building block behind [`hopf_point`].
pub fn hopf_point_from_gain(b: f64, h: f64) -> Result<HopfPoint, HopfError> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(HopfError::InvalidModel);
    }
    if !h.is_finite() || h > 0.0 || h < 0.5 * b {
        return Err(HopfError::GainOutOfRange { h, lower: 0.5 * b });
    }
    let b2 = b - h;
    let disc = b2 * b2 - h * h;
    if disc <= 0.0 {
        return Err(HopfError::DegenerateFrequency);
    }
    let omega0 = libm::sqrt(disc);
    let tau0 = libm::acos(-h / b2) / omega0;
    // Eq.-level identities; a wrong arccos branch would trip these.
    debug_assert!(libm::fabs(libm::cos(omega0 * tau0) + h / b2) < 1e-10);
    debug_assert!(libm::fabs(libm::sin(omega0 * tau0) + omega0 / b2) < 1e-10);
    Ok(HopfPoint { omega0, tau0 })
}

/// Critical frequency and delay `(omega0, tau0)` of the controlled system.
pub fn hopf_point(coeffs: &TaylorCoeffs) -> Result<HopfPoint, HopfError> {
    hopf_point_from_gain(coeffs.b, coeffs.h)
}

/// Closed-form critical delay `-pi / (2 b)` of the uncontrolled system.
pub fn uncontrolled_tau0(b: f64) -> Result<f64, HopfError> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(HopfError::InvalidModel);
    }
    Ok(-core::f64::consts::PI / (2.0 * b))
}

/// Crossing slope `d lambda / d tau` at `tau0`; its real part is strictly
/// positive, so roots cross the imaginary axis left to right.
pub fn transversality(coeffs: &TaylorCoeffs, hp: &HopfPoint) -> TransversalitySlope {
    let (h, b2) = (coeffs.h, coeffs.b2);
    let denom = {
        let a = 1.0 - h * hp.tau0;
        let b = hp.omega0 * hp.tau0;
        a * a + b * b
    };
    TransversalitySlope {
        value: Complex64::new(
            hp.omega0 * hp.omega0 / denom,
            hp.omega0 * (h - b2 * b2 * hp.tau0) / denom,
        ),
    }
}

/// Search configuration for [`find_rightmost_root`].
///
/// Default bounds cover `Re in [-10/tau, 5]`, `Im in [0, 4 pi / tau]`, which
/// captures the first three root branches of the exponential polynomial for
/// `tau <= 20`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearch {
    /// Override the real-axis grid bounds (default `(-10/tau, 5)`).
    pub re_bounds: Option<(f64, f64)>,
    /// Override the imaginary-axis grid bounds (default `(0, 4 pi / tau)`).
    pub im_bounds: Option<(f64, f64)>,
    pub re_points: usize,
    pub im_points: usize,
    /// Residual below which a Newton iterate counts as converged.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Converged roots closer than this are treated as one.
    pub dedup_radius: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        Self {
            re_bounds: None,
            im_bounds: None,
            re_points: 24,
            im_points: 32,
            newton_tol: 1e-12,
            max_iter: 80,
            dedup_radius: 1e-6,
        }
    }
}

/// Root of `lambda - h - b2 exp(-lambda tau)` with maximal real part.
///
/// Damped Newton from a grid of complex seeds; roots are canonicalized to
/// the closed upper half plane (coefficients are real, so roots come in
/// conjugate pairs).
pub fn find_rightmost_root(
    coeffs: &TaylorCoeffs,
    tau: f64,
    search: &RootSearch,
) -> Result<CharRoot, HopfError> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(HopfError::InvalidParameter("tau"));
    }
    let (h, b2) = (coeffs.h, coeffs.b2);
    if tau == 0.0 {
        return Ok(CharRoot {
            lambda: Complex64::new(h + b2, 0.0),
            residual: 0.0,
        });
    }

    let f = |z: Complex64| z - h - b2 * (-z * tau).exp();
    let df = |z: Complex64| Complex64::new(1.0, 0.0) + b2 * tau * (-z * tau).exp();

    let (re_lo, re_hi) = search.re_bounds.unwrap_or((-10.0 / tau, 5.0));
    let (im_lo, im_hi) = search
        .im_bounds
        .unwrap_or((0.0, 4.0 * core::f64::consts::PI / tau));
    if !(re_lo < re_hi) || !(im_lo <= im_hi) || search.re_points < 2 || search.im_points < 2 {
        return Err(HopfError::InvalidParameter("search bounds"));
    }

    let mut roots: Vec<Complex64> = Vec::new();
    for i in 0..search.re_points {
        let re = re_lo + (re_hi - re_lo) * i as f64 / (search.re_points - 1) as f64;
        for j in 0..search.im_points {
            let im = im_lo + (im_hi - im_lo) * j as f64 / (search.im_points - 1) as f64;
            let mut z = Complex64::new(re, im);
            let mut fz = f(z);
            let mut converged = false;
            for _ in 0..search.max_iter {
                if fz.norm() <= search.newton_tol {
                    converged = true;
                    break;
                }
                let d = df(z);
                if d.norm() < 1e-300 {
                    break;
                }
                let mut step = fz / d;
                let mut z_next = z - step;
                let mut f_next = f(z_next);
                let mut halvings = 0;
                while f_next.norm() > fz.norm() && halvings < 10 {
                    step *= 0.5;
                    z_next = z - step;
                    f_next = f(z_next);
                    halvings += 1;
                }
                if !z_next.re.is_finite() || !z_next.im.is_finite() {
                    break;
                }
                if (z_next - z).norm() < 1e-15 * (1.0 + z.norm()) {
                    z = z_next;
                    fz = f(z);
                    converged = fz.norm() <= search.newton_tol;
                    break;
                }
                z = z_next;
                fz = f_next;
            }
            if converged {
                let canonical = if z.im < 0.0 { z.conj() } else { z };
                if !roots
                    .iter()
                    .any(|r| (r - canonical).norm() < search.dedup_radius)
                {
                    roots.push(canonical);
                }
            }
        }
    }

    let best = roots
        .into_iter()
        .max_by(|a, b| a.re.partial_cmp(&b.re).expect("finite roots"))
        .ok_or(HopfError::NoRootFound)?;
    Ok(CharRoot {
        lambda: best,
        residual: f(best).norm(),
    })
}

/// Analytic `tau0(h)` along a gain grid, in grid order.
pub fn tau0_vs_h(b: f64, h_grid: &[f64]) -> Result<Vec<(f64, HopfPoint)>, HopfError> {
    let mut out = Vec::with_capacity(h_grid.len());
    for (index, &h) in h_grid.iter().enumerate() {
        let hp = hopf_point_from_gain(b, h).map_err(|cause| HopfError::AtGrid {
            index,
            cause: Box::new(cause),
        })?;
        out.push((h, hp));
    }
    Ok(out)
}

/// Gain `h in [b/2, 0]` whose critical delay matches `tau_target` to `tol`,
/// by bisection. The bracket is verified at runtime (`tau0` really is
/// larger at the lower end) rather than assuming monotonicity.
pub fn design_gain(b: f64, tau_target: f64, tol: f64) -> Result<f64, HopfError> {
    if !(b < 0.0) || !b.is_finite() {
        return Err(HopfError::InvalidModel);
    }
    if !(tol > 0.0) {
        return Err(HopfError::InvalidParameter("tol"));
    }
    if !tau_target.is_finite() {
        return Err(HopfError::InvalidParameter("tau_target"));
    }
    let tau_min = uncontrolled_tau0(b)?;
    if tau_target < tau_min * (1.0 - 1e-12) {
        return Err(HopfError::TargetTooSmall { min_tau0: tau_min });
    }
    if tau_target <= tau_min {
        return Ok(0.0);
    }

    // lower end: approach b/2 until tau0 exceeds the target
    let mut eps = 1e-6 * libm::fabs(b);
    let floor = 1e-15 * libm::fabs(b);
    let mut h_lo = 0.5 * b + eps;
    let mut tau_lo = hopf_point_from_gain(b, h_lo)?.tau0;
    while tau_lo < tau_target {
        eps *= 0.1;
        if eps < floor {
            return Err(HopfError::BracketFailure);
        }
        h_lo = 0.5 * b + eps;
        tau_lo = hopf_point_from_gain(b, h_lo)?.tau0;
    }
    let mut h_hi = 0.0;
    let tau_hi = tau_min;
    if !(tau_lo >= tau_target && tau_target >= tau_hi) {
        return Err(HopfError::BracketFailure);
    }

    for _ in 0..200 {
        let h_mid = 0.5 * (h_lo + h_hi);
        let tau_mid = hopf_point_from_gain(b, h_mid)?.tau0;
        if libm::fabs(tau_mid - tau_target) <= tol {
            return Ok(h_mid);
        }
        if tau_mid > tau_target {
            h_lo = h_mid;
        } else {
            h_hi = h_mid;
        }
    }
    Err(HopfError::BracketFailure)
}
