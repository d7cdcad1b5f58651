//! Command-line surface over `nethopf-core`: analysis reports, DDE
//! simulations, delay/gain sweeps, gain design and a cross-module
//! verification battery, with a line-oriented config format and CSV output.
//!
//! Exit codes: 0 success, 2 config error, 3 infeasibility, 4 numerical
//! failure.

// `!(a > b)` comparisons deliberately reject NaN along with the bad sign
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::fmt;

/// Failure classes, one per scriptable exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unparseable/invalid configuration (exit 2).
    Config(String),
    /// Structurally valid request outside the feasible domain (exit 3).
    Infeasible(String),
    /// Numerical or I/O failure while executing (exit 4).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o: {e}"))
    }
}

use nethopf_core::diagnostics::DiagnosticsError;
use nethopf_core::hopf::HopfError;
use nethopf_core::model::ModelError;
use nethopf_core::sim::SimError;

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParameter(_) => CliError::Config(e.to_string()),
            ModelError::NoEquilibrium | ModelError::InvalidDemand(_) => {
                CliError::Infeasible(e.to_string())
            }
        }
    }
}

impl From<HopfError> for CliError {
    fn from(e: HopfError) -> Self {
        match e {
            HopfError::InvalidModel
            | HopfError::GainOutOfRange { .. }
            | HopfError::DegenerateFrequency
            | HopfError::TargetTooSmall { .. }
            | HopfError::AtGrid { .. } => CliError::Infeasible(e.to_string()),
            HopfError::NoRootFound | HopfError::BracketFailure => {
                CliError::Numerical(e.to_string())
            }
            HopfError::InvalidParameter(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DiagnosticsError> for CliError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::InvalidParameter(_) => CliError::Config(e.to_string()),
            DiagnosticsError::NotSupercritical => CliError::Infeasible(e.to_string()),
            DiagnosticsError::Model(m) => m.into(),
            DiagnosticsError::Hopf(h) => h.into(),
            DiagnosticsError::Sim(s) => s.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
