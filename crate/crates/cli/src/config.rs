//! Line-oriented run configuration.
//!
//! Format: `section.key = value`, one per line, `#` starts a comment.
//! Unknown keys and duplicate assignments are errors — a typo must never
//! silently fall back to a default. Every key can also be overridden on the
//! command line as `--section.key=value`.
//!
//! ```text
//! # reference configuration
//! model.k = 0.01
//! model.c = 50
//! model.demand = proportional-fair
//! model.weight = 1
//! control.h = -0.1
//! control.tau = 3.4
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use nethopf_core::diagnostics::{OnsetConfig, SweepConfig};
use nethopf_core::model::{DemandFunction, ModelParams};
use nethopf_core::sim::SimConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // model
    pub k: f64,
    pub c: f64,
    pub demand: DemandKind,
    pub weight: f64,
    // control
    pub h: f64,
    pub tau: f64,
    pub tau_target: Option<f64>,
    // sim
    pub steps_per_delay: usize,
    pub duration: f64,
    pub history_scale: f64,
    pub record_stride: usize,
    // detect
    pub transient_fraction: f64,
    pub converge_rel: f64,
    pub cycle_rel: f64,
    pub trend_threshold: f64,
    // sweep
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_count: usize,
    // output
    pub output_path: Option<PathBuf>,
    pub precision: usize,
    pub timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandKind {
    ProportionalFair,
}

impl Default for RunConfig {
    /// The bundled reference configuration: k = 0.01, c = 50, x(p) = 1/p,
    /// giving p* = 0.02 and b = -0.5.
    fn default() -> Self {
        Self {
            k: 0.01,
            c: 50.0,
            demand: DemandKind::ProportionalFair,
            weight: 1.0,
            h: 0.0,
            tau: 3.0,
            tau_target: None,
            steps_per_delay: 40,
            duration: 2000.0,
            history_scale: 1.5,
            record_stride: 1,
            transient_fraction: 0.5,
            converge_rel: 1e-4,
            cycle_rel: 1e-3,
            trend_threshold: 0.02,
            sweep_start: 3.0,
            sweep_stop: 3.4,
            sweep_count: 3,
            output_path: None,
            precision: 17,
            timestamp: false,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("{key}: expected a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("{key}: expected a nonnegative integer, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Config(format!(
            "{key}: expected true or false, got `{value}`"
        ))),
    }
}

impl RunConfig {
    /// Applies one `section.key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "model.k" => self.k = parse_f64(key, value)?,
            "model.c" => self.c = parse_f64(key, value)?,
            "model.demand" => match value {
                "proportional-fair" | "proportional_fair" => {
                    self.demand = DemandKind::ProportionalFair;
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "model.demand: unknown demand kind `{value}` (supported: proportional-fair)"
                    )))
                }
            },
            "model.weight" => self.weight = parse_f64(key, value)?,
            "control.h" => self.h = parse_f64(key, value)?,
            "control.tau" => self.tau = parse_f64(key, value)?,
            "control.tau_target" => self.tau_target = Some(parse_f64(key, value)?),
            "sim.steps_per_delay" => self.steps_per_delay = parse_usize(key, value)?,
            "sim.duration" => self.duration = parse_f64(key, value)?,
            "sim.history_scale" => self.history_scale = parse_f64(key, value)?,
            "sim.record_stride" => self.record_stride = parse_usize(key, value)?,
            "detect.transient_fraction" => self.transient_fraction = parse_f64(key, value)?,
            "detect.converge_rel" => self.converge_rel = parse_f64(key, value)?,
            "detect.cycle_rel" => self.cycle_rel = parse_f64(key, value)?,
            "detect.trend_threshold" => self.trend_threshold = parse_f64(key, value)?,
            "sweep.start" => self.sweep_start = parse_f64(key, value)?,
            "sweep.stop" => self.sweep_stop = parse_f64(key, value)?,
            "sweep.count" => self.sweep_count = parse_usize(key, value)?,
            "output.path" => self.output_path = Some(PathBuf::from(value)),
            "output.precision" => {
                let p = parse_usize(key, value)?;
                if !(1..=17).contains(&p) {
                    return Err(CliError::Config(
                        "output.precision: must be between 1 and 17".into(),
                    ));
                }
                self.precision = p;
            }
            "output.timestamp" => self.timestamp = parse_bool(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected `section.key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
            cfg.set(key, value)
                .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let demand = match self.demand {
            DemandKind::ProportionalFair => DemandFunction::proportional_fair(self.weight)?,
        };
        Ok(ModelParams::new(self.k, self.c, demand)?)
    }

    pub fn sim_config(&self, tau: f64) -> SimConfig {
        SimConfig {
            tau,
            gain: self.h,
            steps_per_delay: self.steps_per_delay,
            duration: self.duration,
            record_stride: self.record_stride,
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            steps_per_delay: self.steps_per_delay,
            duration: self.duration,
            record_stride: self.record_stride,
            history_scale: self.history_scale,
            transient_fraction: self.transient_fraction,
            converge_rel: self.converge_rel,
            cycle_rel: self.cycle_rel,
            trend_threshold: self.trend_threshold,
        }
    }

    pub fn onset_config(&self) -> OnsetConfig {
        OnsetConfig {
            sweep: SweepConfig {
                // refinement horizons start shorter and double as needed
                duration: 600.0_f64.max(10.0 * self.tau),
                ..self.sweep_config()
            },
            ..OnsetConfig::default()
        }
    }

    /// The sweep grid, inclusive of both ends.
    pub fn sweep_grid(&self) -> Result<Vec<f64>, CliError> {
        if self.sweep_count == 0 {
            return Err(CliError::Config("sweep.count: must be at least 1".into()));
        }
        if self.sweep_count == 1 {
            return Ok(vec![self.sweep_start]);
        }
        if !(self.sweep_stop > self.sweep_start) {
            return Err(CliError::Config(
                "sweep.stop must exceed sweep.start".into(),
            ));
        }
        let n = self.sweep_count;
        Ok((0..n)
            .map(|i| {
                self.sweep_start
                    + (self.sweep_stop - self.sweep_start) * i as f64 / (n - 1) as f64
            })
            .collect())
    }
}
