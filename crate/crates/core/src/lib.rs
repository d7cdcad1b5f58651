//! Analysis and simulation of delay-induced Hopf bifurcation in the dual
//! Internet congestion-control model under time-delayed feedback control.
//!
//! The plant is the scalar fluid model
//!
//! ```text
//! p'(t) = k p(t) (x(p(t - tau)) - c)
//! ```
//!
//! where `p` is the link price, `x` a strictly decreasing demand function,
//! `c` the link capacity and `tau` the round-trip communication delay.
//! Adding the delayed feedback force `h (p(t) - p(t - tau))` shifts the
//! critical delay at which the equilibrium sheds a periodic orbit without
//! moving the equilibrium itself.
//!
//! The crate is split along the analysis pipeline:
//!
//! - [`model`] — demand functions, equilibrium, Taylor coefficients of the
//!   controlled system about the equilibrium.
//! - [`hopf`] — critical frequency/delay, feasible gain range, transversality
//!   slope, characteristic-root finding, and gain design.
//! - [`normal_form`] — center-manifold normal-form coefficients
//!   (B, g20, g11, g02, g21, E1, E2, C1(0)) and the derived quantities
//!   mu2, beta2, T2 with their sign-based classification.
//! - [`sim`] — fixed-step fourth-order integration of the delay equation
//!   with stored-history Hermite interpolation.
//! - [`diagnostics`] — limit-cycle detection, parameter sweeps, empirical
//!   onset location, amplitude-scaling and period-trend probes.
//!
//! Everything is `no_std` (with `alloc`); all operations are pure functions
//! of their inputs and safe to evaluate from concurrent tasks.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style comparisons are deliberate: they reject NaN along with
// the out-of-domain sign. Frozen oracle constants are written at full
// 17-digit precision.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

extern crate alloc;

pub mod diagnostics;
pub mod hopf;
pub mod model;
pub mod normal_form;
pub mod sim;

pub use num_complex::Complex64;
