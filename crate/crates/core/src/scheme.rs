//! Scheme identifiers and the common stepping interface.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expint::{EwiState, TsfpState};
use crate::fdtd::FdtdState;
use crate::field::SpinorField;
use crate::par::Exec;
use crate::params::SimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    Lffd,
    Sifd1,
    Sifd2,
    Cnfd,
    EwiFp,
    Tsfp,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [Scheme::Lffd, Scheme::Sifd1, Scheme::Sifd2, Scheme::Cnfd, Scheme::EwiFp, Scheme::Tsfp];
    pub const FDTD: [Scheme; 4] = [Scheme::Lffd, Scheme::Sifd1, Scheme::Sifd2, Scheme::Cnfd];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lffd => "lffd",
            Scheme::Sifd1 => "sifd1",
            Scheme::Sifd2 => "sifd2",
            Scheme::Cnfd => "cnfd",
            Scheme::EwiFp => "ewi-fp",
            Scheme::Tsfp => "tsfp",
        }
    }

    pub fn is_fdtd(self) -> bool {
        matches!(self, Scheme::Lffd | Scheme::Sifd1 | Scheme::Sifd2 | Scheme::Cnfd)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lffd" => Ok(Scheme::Lffd),
            "sifd1" => Ok(Scheme::Sifd1),
            "sifd2" => Ok(Scheme::Sifd2),
            "cnfd" => Ok(Scheme::Cnfd),
            "ewi-fp" | "ewi" | "ewifp" => Ok(Scheme::EwiFp),
            "tsfp" => Ok(Scheme::Tsfp),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

impl TryFrom<String> for Scheme {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.name().to_string()
    }
}

/// A time integrator advancing one step at a time.
pub trait Stepper: Send {
    fn scheme(&self) -> Scheme;
    fn step(&mut self) -> Result<()>;
    fn current(&self) -> &SpinorField;
    fn time(&self) -> f64;
    fn steps_taken(&self) -> usize;
    fn params(&self) -> &SimParams;
}

pub fn build_stepper(scheme: Scheme, params: SimParams) -> Result<Box<dyn Stepper>> {
    build_stepper_with(scheme, params, Exec::default())
}

pub fn build_stepper_with(scheme: Scheme, params: SimParams, exec: Exec) -> Result<Box<dyn Stepper>> {
    Ok(match scheme {
        Scheme::EwiFp => Box::new(EwiState::new(params)?.with_exec(exec)),
        Scheme::Tsfp => Box::new(TsfpState::new(params)?.with_exec(exec)),
        _ => Box::new(FdtdState::new(scheme, params)?.with_exec(exec)),
    })
}

/// Blow-up watchdog: sup-norm above `factor` times the initial sup-norm,
/// or any non-finite value.
#[derive(Debug, Clone, Copy)]
pub struct BlowUpGuard {
    limit: f64,
}

pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e3;

impl BlowUpGuard {
    pub fn new(initial: &SpinorField, factor: f64) -> Self {
        let s = initial.sup_norm();
        Self { limit: if s > 0.0 { factor * s } else { f64::INFINITY } }
    }

    pub fn check(&self, field: &SpinorField, step: usize) -> Result<()> {
        let s = field.sup_norm();
        if !s.is_finite() || s > self.limit {
            return Err(Error::BlowUp { step });
        }
        Ok(())
    }
}

/// Runs to the final time, calling `observe` after construction and after
/// every step. Stops with [`Error::BlowUp`] when the guard trips.
pub fn run_to_end(
    stepper: &mut dyn Stepper,
    blowup_factor: f64,
    mut observe: impl FnMut(&dyn Stepper) -> Result<()>,
) -> Result<()> {
    let guard = BlowUpGuard::new(stepper.current(), blowup_factor);
    let n = stepper.params().steps();
    observe(stepper)?;
    while stepper.steps_taken() < n {
        stepper.step()?;
        guard.check(stepper.current(), stepper.steps_taken())?;
        observe(stepper)?;
    }
    Ok(())
}

/// Builds, runs and returns the field at the final time.
pub fn solve(scheme: Scheme, params: SimParams) -> Result<SpinorField> {
    let mut s = build_stepper(scheme, params)?;
    run_to_end(s.as_mut(), DEFAULT_BLOWUP_FACTOR, |_| Ok(()))?;
    Ok(s.current().clone())
}
