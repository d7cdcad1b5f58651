//! Center-manifold normal form of the Hopf crossing.
//!
//! With `q(theta) = exp(i omega0 theta)` and the adjoint eigenvector
//! normalized through `B = 1 / (1 + b2 tau0 exp(i omega0 tau0))`, the
//! reduced dynamics `z' = i omega0 z + g(z, zbar)` carries
//!
//! ```text
//! g20 = 2 Bb (b4 e^-  + b5 e^--)          e^-  = exp(-i omega0 tau0)
//! g11 =   Bb (b4 (e^+ + e^-) + 2 b5)      e^-- = exp(-2 i omega0 tau0)
//! g02 = 2 Bb (b4 e^+  + b5 e^++)
//! ```
//!
//! The cubic coefficient needs the second-order manifold terms
//!
//! ```text
//! W20(th) = -(g20/(i w0)) e^{i w0 th} - (g02bar/(3 i w0)) e^{-i w0 th} + E1 e^{2 i w0 th}
//! W11(th) =  (g11/(i w0)) e^{i w0 th} - (g11bar/(i w0))   e^{-i w0 th} + E2
//! ```
//!
//! whose constants solve the boundary conditions
//!
//! ```text
//! (h - 2 i w0) W20(0) + b2 W20(-tau0) = g20 + g02bar - 2 (b4 e^- + b5 e^--)
//!  h W11(0)           + b2 W11(-tau0) = g11 + g11bar - (b4 (e^+ + e^-) + 2 b5)
//! ```
//!
//! (both conditions are asserted post hoc, so a sign slip in either E
//! denominator or numerator cannot pass silently). Finally
//!
//! ```text
//! C1(0)  = i/(2 w0) (g20 g11 - 2 |g11|^2 - |g02|^2 / 3) + g21 / 2
//! mu2    = -Re C1(0) / Re lambda'(tau0)
//! T2     = -(Im C1(0) + mu2 Im lambda'(tau0)) / w0
//! beta2  = 2 Re C1(0)
//! ```
//!
//! with the unfolding parameter `tau - tau0`: `mu2 > 0` means the periodic
//! orbits exist past `tau0` (supercritical), `beta2 < 0` that they are
//! stable, `T2 > 0` that their period grows with the delay.

use num_complex::Complex64;

use crate::hopf::{HopfPoint, TransversalitySlope};
use crate::model::TaylorCoeffs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalFormError {
    /// `|1 + b2 tau0 exp(i omega0 tau0)|` vanished; q and q* cannot be paired.
    SingularNormalization,
    /// A center-manifold denominator vanished (resonance / degeneracy).
    SingularDenominator,
    /// A classification quantity is numerically zero; signs are meaningless.
    DegenerateBifurcation,
}

impl core::fmt::Display for NormalFormError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormalFormError::SingularNormalization => {
                write!(f, "eigenvector normalization denominator is singular")
            }
            NormalFormError::SingularDenominator => {
                write!(f, "center-manifold constant denominator is singular")
            }
            NormalFormError::DegenerateBifurcation => {
                write!(f, "mu2, beta2 or T2 is numerically zero")
            }
        }
    }
}

impl core::error::Error for NormalFormError {}

/// Quadratic reduced-equation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoefficients {
    pub g20: Complex64,
    pub g11: Complex64,
    pub g02: Complex64,
}

/// Everything the normal-form pipeline produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormResult {
    /// Adjoint-eigenvector normalization constant B.
    pub normalization: Complex64,
    pub g20: Complex64,
    pub g11: Complex64,
    pub g02: Complex64,
    pub g21: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    /// Lyapunov coefficient C1(0).
    pub c1: Complex64,
    pub mu2: f64,
    pub beta2: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifurcationDirection {
    /// Periodic orbits exist for `tau > tau0` (mu2 > 0).
    Supercritical,
    /// Periodic orbits exist for `tau < tau0` (mu2 < 0).
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitStability {
    /// beta2 < 0.
    Stable,
    /// beta2 > 0.
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodTrend {
    /// T2 > 0.
    Increasing,
    /// T2 < 0.
    Decreasing,
}

/// Sign-based reading of (mu2, beta2, T2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BifurcationClassification {
    pub direction: BifurcationDirection,
    pub orbit_stability: OrbitStability,
    pub period_trend: PeriodTrend,
}

impl core::fmt::Display for BifurcationClassification {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let dir = match self.direction {
            BifurcationDirection::Supercritical => "supercritical",
            BifurcationDirection::Subcritical => "subcritical",
        };
        let orb = match self.orbit_stability {
            OrbitStability::Stable => "stable",
            OrbitStability::Unstable => "unstable",
        };
        let per = match self.period_trend {
            PeriodTrend::Increasing => "increasing",
            PeriodTrend::Decreasing => "decreasing",
        };
        write!(f, "{dir}, {orb} periodic orbits, {per} period")
    }
}

fn unit_phasor(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// Normalization constant `B = 1 / (1 + b2 tau0 exp(i omega0 tau0))` making
/// the eigenvector pairing `<q*, q>` equal one.
pub fn coefficient_b(coeffs: &TaylorCoeffs, hp: &HopfPoint) -> Result<Complex64, NormalFormError> {
    let denom = Complex64::new(1.0, 0.0) + coeffs.b2 * hp.tau0 * unit_phasor(hp.omega0 * hp.tau0);
    if denom.norm() < 1e-12 {
        return Err(NormalFormError::SingularNormalization);
    }
    Ok(denom.inv())
}

/// Quadratic coefficients g20, g11, g02 of the reduced equation.
pub fn quadratic_coefficients(
    coeffs: &TaylorCoeffs,
    hp: &HopfPoint,
    b: Complex64,
) -> QuadraticCoefficients {
    let bb = b.conj();
    let th = hp.omega0 * hp.tau0;
    let (e_m, e_p) = (unit_phasor(-th), unit_phasor(th));
    let (e_m2, e_p2) = (unit_phasor(-2.0 * th), unit_phasor(2.0 * th));
    QuadraticCoefficients {
        g20: 2.0 * bb * (coeffs.b4 * e_m + coeffs.b5 * e_m2),
        g11: bb * (coeffs.b4 * (e_p + e_m) + 2.0 * coeffs.b5),
        g02: 2.0 * bb * (coeffs.b4 * e_p + coeffs.b5 * e_p2),
    }
}

/// Constants E1, E2 of the second-order manifold terms, from the boundary
/// conditions quoted in the module docs.
pub fn center_manifold_constants(
    coeffs: &TaylorCoeffs,
    hp: &HopfPoint,
    quad: &QuadraticCoefficients,
) -> Result<(Complex64, Complex64), NormalFormError> {
    let (h, b2) = (coeffs.h, coeffs.b2);
    let w0 = hp.omega0;
    let th = w0 * hp.tau0;
    let (e_m, e_p) = (unit_phasor(-th), unit_phasor(th));
    let e_m2 = unit_phasor(-2.0 * th);
    let i = Complex64::new(0.0, 1.0);

    let den1 = h + b2 * e_m2 - 2.0 * i * w0;
    if den1.norm() < 1e-12 {
        return Err(NormalFormError::SingularDenominator);
    }
    let den2 = Complex64::new(h + b2, 0.0);
    if den2.norm() < 1e-12 {
        return Err(NormalFormError::SingularDenominator);
    }

    let g20w = quad.g20 / (i * w0);
    let g02bw = quad.g02.conj() / (3.0 * i * w0);
    let phi1 = (h - 2.0 * i * w0) * (g20w + g02bw) + b2 * (g20w * e_m + g02bw * e_p) + quad.g20
        + quad.g02.conj()
        - 2.0 * (coeffs.b4 * e_m + coeffs.b5 * e_m2);
    let e1 = phi1 / den1;

    let g11w = quad.g11 / (i * w0);
    let g11bw = quad.g11.conj() / (i * w0);
    let phi2 = -h * (g11w - g11bw) - b2 * (g11w * e_m - g11bw * e_p) + quad.g11 + quad.g11.conj()
        - (coeffs.b4 * (e_p + e_m) + 2.0 * coeffs.b5);
    let e2 = phi2 / den2;

    // post-hoc boundary-condition residuals (see module docs)
    debug_assert!({
        let w20 = |theta: f64| {
            -g20w * unit_phasor(w0 * theta) - g02bw * unit_phasor(-w0 * theta)
                + e1 * unit_phasor(2.0 * w0 * theta)
        };
        let rhs = quad.g20 + quad.g02.conj() - 2.0 * (coeffs.b4 * e_m + coeffs.b5 * e_m2);
        ((h - 2.0 * i * w0) * w20(0.0) + b2 * w20(-hp.tau0) - rhs).norm()
            < 1e-9 * (1.0 + rhs.norm())
    });
    debug_assert!({
        let w11 = |theta: f64| {
            g11w * unit_phasor(w0 * theta) - g11bw * unit_phasor(-w0 * theta) + e2
        };
        let rhs =
            quad.g11 + quad.g11.conj() - (coeffs.b4 * (e_p + e_m) + 2.0 * coeffs.b5);
        (h * w11(0.0) + b2 * w11(-hp.tau0) - rhs).norm() < 1e-9 * (1.0 + rhs.norm())
    });

    Ok((e1, e2))
}

/// Cubic coefficient g21, evaluating W20 and W11 at `theta = 0` and
/// `theta = -tau0`.
pub fn cubic_coefficient(
    coeffs: &TaylorCoeffs,
    hp: &HopfPoint,
    b: Complex64,
    quad: &QuadraticCoefficients,
    e1: Complex64,
    e2: Complex64,
) -> Complex64 {
    let bb = b.conj();
    let w0 = hp.omega0;
    let th = w0 * hp.tau0;
    let (e_m, e_p) = (unit_phasor(-th), unit_phasor(th));
    let e_m2 = unit_phasor(-2.0 * th);
    let i = Complex64::new(0.0, 1.0);

    let g20w = quad.g20 / (i * w0);
    let g02bw = quad.g02.conj() / (3.0 * i * w0);
    let g11w = quad.g11 / (i * w0);
    let g11bw = quad.g11.conj() / (i * w0);

    let w20 = |theta: f64| {
        -g20w * unit_phasor(w0 * theta) - g02bw * unit_phasor(-w0 * theta)
            + e1 * unit_phasor(2.0 * w0 * theta)
    };
    let w11 =
        |theta: f64| g11w * unit_phasor(w0 * theta) - g11bw * unit_phasor(-w0 * theta) + e2;

    let (w20_0, w20_m) = (w20(0.0), w20(-hp.tau0));
    let (w11_0, w11_m) = (w11(0.0), w11(-hp.tau0));

    2.0 * bb
        * (coeffs.b4 * (w11_0 * e_m + 0.5 * w20_0 * e_p + w11_m + 0.5 * w20_m)
            + coeffs.b5 * (2.0 * w11_m * e_m + w20_m * e_p)
            + coeffs.b8 * (e_m2 + 2.0)
            + 3.0 * coeffs.b9 * e_m)
}

/// Lyapunov coefficient and the three classification quantities.
pub fn lyapunov_quantities(
    quad: &QuadraticCoefficients,
    g21: Complex64,
    slope: &TransversalitySlope,
    hp: &HopfPoint,
) -> (Complex64, f64, f64, f64) {
    let i = Complex64::new(0.0, 1.0);
    let c1 = i / (2.0 * hp.omega0)
        * (quad.g20 * quad.g11 - 2.0 * quad.g11.norm_sqr() - quad.g02.norm_sqr() / 3.0)
        + 0.5 * g21;
    let mu2 = -c1.re / slope.re();
    let t2 = -(c1.im + mu2 * slope.im()) / hp.omega0;
    let beta2 = 2.0 * c1.re;
    (c1, mu2, beta2, t2)
}

/// Full pipeline: B, quadratic coefficients, E1/E2, g21, C1(0) and the
/// classification quantities.
pub fn evaluate(
    coeffs: &TaylorCoeffs,
    hp: &HopfPoint,
    slope: &TransversalitySlope,
) -> Result<NormalFormResult, NormalFormError> {
    let b = coefficient_b(coeffs, hp)?;
    let quad = quadratic_coefficients(coeffs, hp, b);
    let (e1, e2) = center_manifold_constants(coeffs, hp, &quad)?;
    let g21 = cubic_coefficient(coeffs, hp, b, &quad, e1, e2);
    let (c1, mu2, beta2, t2) = lyapunov_quantities(&quad, g21, slope, hp);
    Ok(NormalFormResult {
        normalization: b,
        g20: quad.g20,
        g11: quad.g11,
        g02: quad.g02,
        g21,
        e1,
        e2,
        c1,
        mu2,
        beta2,
        t2,
    })
}

/// Theorem-2 sign rules; errors out when any quantity is numerically zero.
pub fn classify(result: &NormalFormResult) -> Result<BifurcationClassification, NormalFormError> {
    if libm::fabs(result.mu2) < 1e-12
        || libm::fabs(result.beta2) < 1e-12
        || libm::fabs(result.t2) < 1e-12
    {
        return Err(NormalFormError::DegenerateBifurcation);
    }
    Ok(BifurcationClassification {
        direction: if result.mu2 > 0.0 {
            BifurcationDirection::Supercritical
        } else {
            BifurcationDirection::Subcritical
        },
        orbit_stability: if result.beta2 < 0.0 {
            OrbitStability::Stable
        } else {
            OrbitStability::Unstable
        },
        period_trend: if result.t2 > 0.0 {
            PeriodTrend::Increasing
        } else {
            PeriodTrend::Decreasing
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{hopf_point, transversality};

    fn coeffs(h: f64) -> TaylorCoeffs {
        // reference configuration: k = 0.01, c = 50, x = 1/p
        TaylorCoeffs {
            b: -0.5,
            b2: -0.5 - h,
            b4: -12.5,
            b5: 25.0,
            b8: 1250.0 / 3.0,
            b9: -1250.0,
            h,
        }
    }

    fn pipeline(h: f64) -> NormalFormResult {
        let tc = coeffs(h);
        let hp = hopf_point(&tc).unwrap();
        let slope = transversality(&tc, &hp);
        evaluate(&tc, &hp, &slope).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    // Regression constants below are frozen from
    // scripts/normal_form_reference.py (mpmath, 50 digits).

    #[test]
    fn reference_pipeline_uncontrolled() {
        let r = pipeline(0.0);
        assert!(close(
            r.normalization,
            Complex64::new(0.28840043914200094, 0.45301835045029021),
            1e-14
        ));
        assert!(close(
            r.g20,
            Complex64::new(-3.094563195842792, 29.860928501064534),
            1e-13
        ));
        assert!(close(
            r.g11,
            Complex64::new(14.420021957100047, -22.65091752251451),
            1e-13
        ));
        assert!(close(
            r.g02,
            Complex64::new(-25.745480718357302, 15.440906543964487),
            1e-13
        ));
        assert!(close(r.e1, Complex64::new(40.0, 30.0), 1e-12));
        assert!(close(r.e2, Complex64::new(100.0, 0.0), 1e-12));
        assert!(close(
            r.g21,
            Complex64::new(242.99953040936233, 1287.5921894368795),
            1e-12
        ));
        assert!(close(
            r.c1,
            Complex64::new(-379.19017515730801, -466.86946570618712),
            1e-12
        ));
        assert!((r.mu2 - 5259.217722211644).abs() < 1e-8 * 5259.2);
        assert!((r.t2 - 2125.0).abs() < 1e-8 * 2125.0);
        assert!((r.beta2 - -758.38035031461602).abs() < 1e-8 * 758.4);
    }

    #[test]
    fn reference_pipeline_controlled() {
        let r = pipeline(-0.1);
        assert!(close(
            r.normalization,
            Complex64::new(0.26798807159957562, 0.3322433037922926),
            1e-14
        ));
        assert!(close(r.e1, Complex64::new(56.25, 24.206145913796356), 1e-12));
        assert!(close(r.e2, Complex64::new(112.5, 0.0), 1e-12));
        assert!(close(
            r.g21,
            Complex64::new(-810.26676598980159, 1110.7726747444308),
            1e-12
        ));
        assert!(close(
            r.c1,
            Complex64::new(-754.47364317820818, -496.09439894232063),
            1e-12
        ));
        assert!((r.mu2 - 27605.573070916696).abs() < 1e-8 * 27605.0);
        assert!((r.t2 - 5572.9166666666667).abs() < 1e-8 * 5572.9);
        assert!((r.beta2 - -1508.9472863564164).abs() < 1e-8 * 1508.9);
    }

    #[test]
    fn paper_reported_values_within_one_percent() {
        let r0 = pipeline(0.0);
        assert!((r0.mu2 - 5259.2).abs() < 0.01 * 5259.2);
        assert!((r0.t2 - 2125.0).abs() < 0.01 * 2125.0);
        assert!((r0.beta2 - -758.38).abs() < 0.01 * 758.38);

        let r1 = pipeline(-0.1);
        assert!((r1.mu2 - 27606.0).abs() < 0.01 * 27606.0);
        assert!((r1.t2 - 5572.9).abs() < 0.01 * 5572.9);
        assert!((r1.beta2 - -1508.9).abs() < 0.01 * 1508.9);
    }

    #[test]
    fn normalization_definitional_identity() {
        for h in [0.0, -0.1, -0.15, -0.2] {
            let tc = coeffs(h);
            let hp = hopf_point(&tc).unwrap();
            let b = coefficient_b(&tc, &hp).unwrap();
            // <q*, q> reconstruction: conj(B) (1 + b2 tau0 e^{-i th}) = 1
            let th = hp.omega0 * hp.tau0;
            let recon = b.conj()
                * (Complex64::new(1.0, 0.0)
                    + tc.b2 * hp.tau0 * Complex64::new(libm::cos(th), -libm::sin(th)));
            assert!((recon - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_b2_gives_unit_normalization() {
        let tc = TaylorCoeffs {
            b: -0.5,
            b2: 0.0,
            b4: 0.0,
            b5: 0.0,
            b8: 0.0,
            b9: 0.0,
            h: -0.5,
        };
        let hp = crate::hopf::HopfPoint {
            omega0: 0.5,
            tau0: 1.0,
        };
        assert_eq!(
            coefficient_b(&tc, &hp).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn quadratic_terms_vanish_without_quadratic_nonlinearity() {
        let mut tc = coeffs(0.0);
        tc.b4 = 0.0;
        tc.b5 = 0.0;
        let hp = hopf_point(&tc).unwrap();
        let b = coefficient_b(&tc, &hp).unwrap();
        let q = quadratic_coefficients(&tc, &hp, b);
        assert_eq!(q.g20, Complex64::new(0.0, 0.0));
        assert_eq!(q.g11, Complex64::new(0.0, 0.0));
        assert_eq!(q.g02, Complex64::new(0.0, 0.0));
        let (e1, e2) = center_manifold_constants(&tc, &hp, &q).unwrap();
        assert_eq!(e1, Complex64::new(0.0, 0.0));
        assert_eq!(e2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cubic_closed_form_when_quadratic_vanishes() {
        // with b4 = b5 = 0 the W terms drop out of g21 entirely
        let mut tc = coeffs(0.0);
        tc.b4 = 0.0;
        tc.b5 = 0.0;
        let hp = hopf_point(&tc).unwrap();
        let b = coefficient_b(&tc, &hp).unwrap();
        let q = quadratic_coefficients(&tc, &hp, b);
        let (e1, e2) = center_manifold_constants(&tc, &hp, &q).unwrap();
        let g21 = cubic_coefficient(&tc, &hp, b, &q, e1, e2);
        let th = hp.omega0 * hp.tau0;
        let e_m = Complex64::new(libm::cos(th), -libm::sin(th));
        let e_m2 = Complex64::new(libm::cos(2.0 * th), -libm::sin(2.0 * th));
        let expected = 2.0 * b.conj() * (tc.b8 * (e_m2 + 2.0) + 3.0 * tc.b9 * e_m);
        assert!((g21 - expected).norm() < 1e-10 * expected.norm());

        // and with the cubic terms gone too, g21 = 0
        tc.b8 = 0.0;
        tc.b9 = 0.0;
        let g21 = cubic_coefficient(&tc, &hp, b, &q, e1, e2);
        assert_eq!(g21, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn singular_denominator_flagged() {
        // h + b2 = b = 0 is not reachable through the model, force it directly
        let tc = TaylorCoeffs {
            b: 0.0,
            b2: 0.25,
            b4: 1.0,
            b5: 1.0,
            b8: 0.0,
            b9: 0.0,
            h: -0.25,
        };
        let hp = crate::hopf::HopfPoint {
            omega0: 0.3,
            tau0: 2.0,
        };
        let b = coefficient_b(&tc, &hp).unwrap();
        let q = quadratic_coefficients(&tc, &hp, b);
        assert_eq!(
            center_manifold_constants(&tc, &hp, &q).unwrap_err(),
            NormalFormError::SingularDenominator
        );
    }

    #[test]
    fn lyapunov_quantities_homogeneous_in_g() {
        let tc = coeffs(0.0);
        let hp = hopf_point(&tc).unwrap();
        let slope = transversality(&tc, &hp);
        let zero = QuadraticCoefficients {
            g20: Complex64::new(0.0, 0.0),
            g11: Complex64::new(0.0, 0.0),
            g02: Complex64::new(0.0, 0.0),
        };
        let (c1, mu2, beta2, t2) =
            lyapunov_quantities(&zero, Complex64::new(0.0, 0.0), &slope, &hp);
        assert_eq!(c1, Complex64::new(0.0, 0.0));
        assert_eq!((mu2, beta2, t2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn classification_reference_and_sign_rules() {
        let r = pipeline(0.0);
        let cls = classify(&r).unwrap();
        assert_eq!(cls.direction, BifurcationDirection::Supercritical);
        assert_eq!(cls.orbit_stability, OrbitStability::Stable);
        assert_eq!(cls.period_trend, PeriodTrend::Increasing);

        let flipped = NormalFormResult {
            mu2: -1.0,
            beta2: 1.0,
            t2: -1.0,
            ..r
        };
        let cls = classify(&flipped).unwrap();
        assert_eq!(cls.direction, BifurcationDirection::Subcritical);
        assert_eq!(cls.orbit_stability, OrbitStability::Unstable);
        assert_eq!(cls.period_trend, PeriodTrend::Decreasing);

        let degenerate = NormalFormResult { mu2: 0.0, ..r };
        assert_eq!(
            classify(&degenerate).unwrap_err(),
            NormalFormError::DegenerateBifurcation
        );
    }

    #[test]
    fn pipeline_is_bit_deterministic() {
        let a = pipeline(-0.1);
        let b = pipeline(-0.1);
        assert_eq!(a, b);
    }

    #[test]
    fn beta2_and_mu2_tied_to_c1() {
        for h in [0.0, -0.05, -0.1, -0.15, -0.2] {
            let r = pipeline(h);
            assert_eq!(r.beta2, 2.0 * r.c1.re);
            assert!(r.mu2.signum() == -r.c1.re.signum());
        }
    }

    #[test]
    fn g11_reality_and_conjugate_symmetry() {
        for h in [0.0, -0.1, -0.2] {
            let r = pipeline(h);
            let ratio = r.g11 / r.normalization.conj();
            assert!(ratio.im.abs() < 1e-10 * (1.0 + ratio.re.abs()));
            let lhs = r.g02 * r.normalization;
            let rhs = (r.g20 * r.normalization).conj();
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
