//! Two-state (up/down) component model and exponential duration sampling.
//!
//! Rates are per year; mean durations are in hours via the 8760 h/yr factor.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::model::HOURS_PER_YEAR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateParams {
    /// Failures per year.
    pub lambda: f64,
    /// Repairs per year.
    pub mu: f64,
    pub mttf_hours: f64,
    pub mttr_hours: f64,
}

impl TwoStateParams {
    pub fn new(lambda: f64, mu: f64) -> Self {
        TwoStateParams {
            lambda,
            mu,
            mttf_hours: if lambda > 0.0 { HOURS_PER_YEAR / lambda } else { f64::INFINITY },
            mttr_hours: if mu > 0.0 { HOURS_PER_YEAR / mu } else { f64::INFINITY },
        }
    }

    /// Long-run unavailability λ/(λ+μ).
    pub fn unavailability(&self) -> f64 {
        if self.lambda == 0.0 {
            0.0
        } else {
            self.lambda / (self.lambda + self.mu)
        }
    }
}

fn check_uniform(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("uniform sample {u} outside (0, 1]")))
    }
}

/// Time to repair, hours: `−ln(u)·MTTR`.
pub fn sample_ttr(params: &TwoStateParams, u: f64) -> Result<f64> {
    check_uniform(u)?;
    Ok(-u.ln() * params.mttr_hours)
}

/// Time to failure, hours: `−ln(u)/λ·8760`; infinite for a non-failing component.
pub fn sample_ttf(params: &TwoStateParams, u: f64) -> Result<f64> {
    check_uniform(u)?;
    if params.lambda <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-u.ln() / params.lambda * HOURS_PER_YEAR)
}

/// Source of uniform variates on (0, 1].
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Adapts any `rand` generator.
pub struct RngUniform<R>(pub R);

impl<R: RngCore> UniformSource for RngUniform<R> {
    fn next_uniform(&mut self) -> f64 {
        // random::<f64>() is on [0, 1); reflect onto (0, 1].
        1.0 - self.0.random::<f64>()
    }
}

/// Replays a fixed sequence; yields 1.0 (zero duration) once exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedUniform {
    values: Vec<f64>,
    next: usize,
}

impl ScriptedUniform {
    pub fn new(values: Vec<f64>) -> Self {
        ScriptedUniform { values, next: 0 }
    }

    /// Uniform that makes `sample_ttf` return `hours` for rate `lambda`.
    pub fn for_ttf(hours: f64, lambda: f64) -> f64 {
        (-hours * lambda / HOURS_PER_YEAR).exp()
    }

    /// Uniform that makes `sample_ttr` return `hours` for rate `mu`.
    pub fn for_ttr(hours: f64, mu: f64) -> f64 {
        (-hours * mu / HOURS_PER_YEAR).exp()
    }
}

impl UniformSource for ScriptedUniform {
    fn next_uniform(&mut self) -> f64 {
        let v = self.values.get(self.next).copied().unwrap_or(1.0);
        self.next += 1;
        v
    }
}
