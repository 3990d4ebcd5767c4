//! Simulation parameters shared by every integrator.

use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::grid::Grid;
use crate::potential::PotentialSet;

#[derive(Debug, Clone)]
pub struct SimParams {
    pub eps: f64,
    pub tau: f64,
    pub t_final: f64,
    pub grid: Grid,
    pub potentials: PotentialSet,
    pub initial: SpinorField,
    /// ∂_x Φ₀ for the finite-difference first step; spectral when absent.
    pub initial_derivative: Option<SpinorField>,
}

pub fn validate_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::arg("eps", format!("must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

impl SimParams {
    pub fn new(
        eps: f64,
        tau: f64,
        t_final: f64,
        potentials: PotentialSet,
        initial: SpinorField,
    ) -> Result<Self> {
        let p = Self {
            eps,
            tau,
            t_final,
            grid: *initial.grid(),
            potentials,
            initial,
            initial_derivative: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_derivative(mut self, d: SpinorField) -> Result<Self> {
        if !d.same_shape(&self.initial) {
            return Err(Error::arg("initial_derivative", "shape differs from the initial field"));
        }
        self.initial_derivative = Some(d);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_eps(self.eps)?;
        if !(self.tau > 0.0) {
            return Err(Error::arg("tau", format!("must be positive, got {}", self.tau)));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::arg("T", format!("must be positive, got {}", self.t_final)));
        }
        if self.tau > self.t_final * (1.0 + 1e-12) {
            return Err(Error::arg("tau", format!("tau = {} exceeds T = {}", self.tau, self.t_final)));
        }
        let ratio = self.t_final / self.tau;
        if (ratio - ratio.round()).abs() > 1e-12 * ratio {
            return Err(Error::arg("tau", format!("T/tau = {ratio} is not an integer")));
        }
        if *self.initial.grid() != self.grid {
            return Err(Error::arg("grid", "initial field lives on another grid"));
        }
        if self.grid.dim() == 1 && self.potentials.a.len() > 1 {
            return Err(Error::arg("A", "1D problems take at most one magnetic component"));
        }
        self.initial.check_finite()
    }

    /// Number of steps N = T/tau.
    pub fn steps(&self) -> usize {
        (self.t_final / self.tau).round() as usize
    }

    /// Largest tau <= tau_max dividing T into whole steps.
    pub fn fit_tau(t_final: f64, tau_max: f64) -> f64 {
        let n = (t_final / tau_max * (1.0 - 1e-14)).ceil().max(1.0);
        t_final / n
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let mut p = self.clone();
        p.tau = tau;
        p.validate()?;
        Ok(p)
    }
}
