//! The dual congestion-control fluid model.
//!
//! ```text
//! p'(t) = k p(t) (x(p(t - tau)) - c)                      (uncontrolled)
//! p'(t) = k p(t) (x(p(t - tau)) - c) + h (p(t) - p(t-tau))  (controlled)
//! ```
//!
//! The equilibrium price solves `x(p*) = c`. Writing `u = p - p*` and
//! expanding the controlled right-hand side to cubic order gives
//!
//! ```text
//! u'(t) = h u(t) + b2 u(t-tau) + b4 u(t) u(t-tau) + b5 u(t-tau)^2
//!         + b8 u(t) u(t-tau)^2 + b9 u(t-tau)^3 + O(u^4)
//! ```
//!
//! with `b = k p* x'(p*)`, `b2 = b - h`, `b4 = k x'(p*)/2`,
//! `b5 = k p* x''(p*)/2`, `b8 = k x''(p*)/6`, `b9 = k p* x'''(p*)/6`.
//! Everything downstream (critical delay, normal form, gain design) is a
//! function of these coefficients.

use alloc::sync::Arc;

/// Errors from model construction, validation and equilibrium solving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// A constructor argument violated its domain (named for diagnostics).
    InvalidParameter(&'static str),
    /// The demand function never crosses the capacity on the search interval.
    NoEquilibrium,
    /// Monotonicity, positivity or derivative-consistency checks failed.
    InvalidDemand(&'static str),
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::InvalidParameter(name) => write!(f, "invalid parameter: {name}"),
            ModelError::NoEquilibrium => {
                write!(f, "demand never crosses capacity on the search interval")
            }
            ModelError::InvalidDemand(why) => write!(f, "invalid demand function: {why}"),
        }
    }
}

impl core::error::Error for ModelError {}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

enum DemandKind {
    ProportionalFair { weight: f64 },
    UserSupplied {
        value: Evaluator,
        d1: Evaluator,
        d2: Evaluator,
        d3: Evaluator,
    },
}

impl Clone for DemandKind {
    fn clone(&self) -> Self {
        match self {
            DemandKind::ProportionalFair { weight } => {
                DemandKind::ProportionalFair { weight: *weight }
            }
            DemandKind::UserSupplied { value, d1, d2, d3 } => DemandKind::UserSupplied {
                value: value.clone(),
                d1: d1.clone(),
                d2: d2.clone(),
                d3: d3.clone(),
            },
        }
    }
}

/// Strictly decreasing, positive source-rate demand `x(p)` with three
/// derivatives.
///
/// The proportionally fair allocation `x(p) = w/p` is built in with exact
/// derivatives; arbitrary demands supply their own evaluators and are
/// guarded by [`DemandFunction::check_derivatives`].
#[derive(Clone)]
pub struct DemandFunction {
    kind: DemandKind,
}

impl core::fmt::Debug for DemandFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => {
                write!(f, "DemandFunction::ProportionalFair {{ weight: {weight} }}")
            }
            DemandKind::UserSupplied { .. } => write!(f, "DemandFunction::UserSupplied {{ .. }}"),
        }
    }
}

impl DemandFunction {
    /// Proportionally fair demand `x(p) = w/p`, `w > 0`.
    pub fn proportional_fair(weight: f64) -> Result<Self, ModelError> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(ModelError::InvalidParameter("weight"));
        }
        Ok(Self {
            kind: DemandKind::ProportionalFair { weight },
        })
    }

    /// Demand with explicitly supplied value and first three derivatives.
    pub fn user_supplied(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: DemandKind::UserSupplied {
                value: Arc::new(value),
                d1: Arc::new(d1),
                d2: Arc::new(d2),
                d3: Arc::new(d3),
            },
        }
    }

    /// Weight of a proportionally fair demand, if that is what this is.
    pub fn proportional_fair_weight(&self) -> Option<f64> {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => Some(*weight),
            DemandKind::UserSupplied { .. } => None,
        }
    }

    pub fn value(&self, p: f64) -> f64 {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => weight / p,
            DemandKind::UserSupplied { value, .. } => value(p),
        }
    }

    pub fn d1(&self, p: f64) -> f64 {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => -weight / (p * p),
            DemandKind::UserSupplied { d1, .. } => d1(p),
        }
    }

    pub fn d2(&self, p: f64) -> f64 {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => 2.0 * weight / (p * p * p),
            DemandKind::UserSupplied { d2, .. } => d2(p),
        }
    }

    pub fn d3(&self, p: f64) -> f64 {
        match &self.kind {
            DemandKind::ProportionalFair { weight } => -6.0 * weight / (p * p * p * p),
            DemandKind::UserSupplied { d3, .. } => d3(p),
        }
    }

    /// Positivity of `x` and strict decrease (`x' < 0`) at the sample points.
    pub fn check_monotonic(&self, points: &[f64]) -> Result<(), ModelError> {
        for &p in points {
            if !(p > 0.0) {
                return Err(ModelError::InvalidParameter("sample point"));
            }
            if !(self.value(p) > 0.0) {
                return Err(ModelError::InvalidDemand("x(p) must be positive"));
            }
            if !(self.d1(p) < 0.0) {
                return Err(ModelError::InvalidDemand("x'(p) must be negative"));
            }
        }
        Ok(())
    }

    /// Checks positivity, strict decrease, and that the supplied derivatives
    /// agree with central finite differences of `value` to relative error
    /// `rel_tol` at each of `points`.
    ///
    /// Fourth-order stencils with relative steps ~1e-2 (5e-3 for the third
    /// derivative) keep both truncation and roundoff well below 1e-5 for
    /// smooth demands at their natural scale.
    pub fn check_derivatives(&self, points: &[f64], rel_tol: f64) -> Result<(), ModelError> {
        for &p in points {
            self.check_monotonic(&[p])?;
            let e1 = 1e-2 * p;
            let f = |q: f64| self.value(q);
            let fd1 =
                (-f(p + 2.0 * e1) + 8.0 * f(p + e1) - 8.0 * f(p - e1) + f(p - 2.0 * e1)) / (12.0 * e1);
            let fd2 = (-f(p + 2.0 * e1) + 16.0 * f(p + e1) - 30.0 * f(p) + 16.0 * f(p - e1)
                - f(p - 2.0 * e1))
                / (12.0 * e1 * e1);
            let e3 = 5e-3 * p;
            let fd3 = (f(p - 3.0 * e3) - 8.0 * f(p - 2.0 * e3) + 13.0 * f(p - e3)
                - 13.0 * f(p + e3)
                + 8.0 * f(p + 2.0 * e3)
                - f(p + 3.0 * e3))
                / (8.0 * e3 * e3 * e3);
            let rel = |a: f64, b: f64| libm::fabs(a - b) / libm::fabs(b).max(f64::MIN_POSITIVE);
            if rel(fd1, self.d1(p)) > rel_tol {
                return Err(ModelError::InvalidDemand("x' inconsistent with x"));
            }
            if rel(fd2, self.d2(p)) > rel_tol {
                return Err(ModelError::InvalidDemand("x'' inconsistent with x"));
            }
            if rel(fd3, self.d3(p)) > rel_tol {
                return Err(ModelError::InvalidDemand("x''' inconsistent with x"));
            }
        }
        Ok(())
    }
}

/// Gain, capacity and demand; everything needed to evaluate the fluid model.
#[derive(Debug, Clone)]
pub struct ModelParams {
    k: f64,
    c: f64,
    demand: DemandFunction,
}

impl ModelParams {
    pub fn new(k: f64, c: f64, demand: DemandFunction) -> Result<Self, ModelError> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(ModelError::InvalidParameter("k"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(ModelError::InvalidParameter("c"));
        }
        Ok(Self { k, c, demand })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn demand(&self) -> &DemandFunction {
        &self.demand
    }

    /// Right-hand side of the controlled system for state `p`, delayed state
    /// `p_delayed` and feedback gain `h`. With `h = 0` this is the
    /// uncontrolled model; at `p = p_delayed = p*` it vanishes for any `h`.
    pub fn rhs(&self, p: f64, p_delayed: f64, h: f64) -> f64 {
        self.k * p * (self.demand.value(p_delayed) - self.c) + h * (p - p_delayed)
    }
}

/// Equilibrium price: the unique `p* > 0` with `x(p*) = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    p_star: f64,
}

impl Equilibrium {
    pub fn p_star(&self) -> f64 {
        self.p_star
    }
}

/// Taylor coefficients of the controlled system about the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoeffs {
    /// `b = k p* x'(p*)` (always negative for a valid model).
    pub b: f64,
    /// Linear delayed coefficient `b2 = b - h`.
    pub b2: f64,
    /// `k x'(p*) / 2`.
    pub b4: f64,
    /// `k p* x''(p*) / 2`.
    pub b5: f64,
    /// `k x''(p*) / 6`.
    pub b8: f64,
    /// `k p* x'''(p*) / 6`.
    pub b9: f64,
    /// Feedback gain the expansion was taken at.
    pub h: f64,
}

/// Solves `x(p*) = c` to relative tolerance `tol` (relative to `c`).
///
/// Proportionally fair demand uses the closed form `p* = w/c`; user-supplied
/// demand is bracketed on a geometric grid over [1e-9, 1e9], bisected, and
/// polished with Newton steps.
pub fn solve_equilibrium(params: &ModelParams, tol: f64) -> Result<Equilibrium, ModelError> {
    if !(tol > 0.0) {
        return Err(ModelError::InvalidParameter("tol"));
    }
    let demand = &params.demand;
    if let Some(w) = demand.proportional_fair_weight() {
        return Ok(Equilibrium {
            p_star: w / params.c,
        });
    }

    let g = |p: f64| demand.value(p) - params.c;

    // geometric march for a sign change of x(p) - c; x decreasing means
    // g goes from positive to negative
    let mut lo = 1e-9;
    if g(lo) <= 0.0 {
        return Err(bracket_failure(demand));
    }
    let mut hi = lo;
    loop {
        hi *= 10.0;
        if hi > 1e9 {
            return Err(bracket_failure(demand));
        }
        if g(hi) <= 0.0 {
            break;
        }
        lo = hi;
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let mut p = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = demand.d1(p);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = g(p) / d;
        let next = p - step;
        if next > 0.0 && next.is_finite() {
            p = next;
        }
    }

    if libm::fabs(g(p)) > tol * params.c {
        return Err(bracket_failure(demand));
    }
    demand.check_derivatives(&[0.5 * p, p, 2.0 * p], 1e-5)?;
    Ok(Equilibrium { p_star: p })
}

// Prefer the more specific InvalidDemand when the demand visibly violates
// monotonicity/positivity; otherwise the demand simply never meets c.
fn bracket_failure(demand: &DemandFunction) -> ModelError {
    match demand.check_monotonic(&[1e-6, 1e-3, 1.0, 1e3, 1e6]) {
        Err(e) => e,
        Ok(()) => ModelError::NoEquilibrium,
    }
}

/// Expansion coefficients of the controlled system at `eq` with gain `h`.
pub fn taylor_coeffs(
    params: &ModelParams,
    eq: &Equilibrium,
    h: f64,
) -> Result<TaylorCoeffs, ModelError> {
    if !h.is_finite() {
        return Err(ModelError::InvalidParameter("h"));
    }
    let p = eq.p_star();
    let (k, x1, x2, x3) = (
        params.k,
        params.demand.d1(p),
        params.demand.d2(p),
        params.demand.d3(p),
    );
    let b = k * p * x1;
    if !(b < 0.0) {
        return Err(ModelError::InvalidDemand("x'(p*) must be negative"));
    }
    Ok(TaylorCoeffs {
        b,
        b2: b - h,
        b4: 0.5 * k * x1,
        b5: 0.5 * k * p * x2,
        b8: k * x2 / 6.0,
        b9: k * p * x3 / 6.0,
        h,
    })
}
