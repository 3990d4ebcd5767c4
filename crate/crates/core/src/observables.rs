//! Densities, currents, mass and energy of spinor fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{kinetic_matrix, mass_matrix, CMat};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::params::validate_eps;
use crate::potential::{sample_potential, PotentialSet};
use crate::spectral::SpectralPlan;

/// Discrete mass h Σ_j |Φ_j|² (h1 h2 in 2D).
pub fn mass(field: &SpinorField) -> f64 {
    field.grid().weight() * field.data().iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Nodewise densities and currents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurrent {
    /// Total density ρ = Σ_c |φ_c|².
    pub rho: Vec<f64>,
    /// Component densities ρ_c = |φ_c|².
    pub rho_c: Vec<Vec<f64>>,
    /// Current components J_k = (1/ε) Φ* σ_k Φ (α_k for four components).
    pub current: Vec<Vec<f64>>,
}

pub fn density_current(field: &SpinorField, eps: f64) -> Result<DensityCurrent> {
    validate_eps(eps)?;
    let n = field.nodes();
    let nc = field.ncomp();
    let rho_c: Vec<Vec<f64>> = (0..nc).map(|c| field.component(c).iter().map(|z| z.norm_sqr()).collect()).collect();
    let rho = (0..n).map(|j| rho_c.iter().map(|r| r[j]).sum()).collect();
    let ncur = if nc == 2 { field.grid().dim() } else { 3 };
    let current = (0..ncur)
        .map(|k| match nc {
            2 => quadratic_form::<2>(field, &kinetic_matrix::<2>(k)?, 1.0 / eps),
            _ => quadratic_form::<4>(field, &kinetic_matrix::<4>(k)?, 1.0 / eps),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityCurrent { rho, rho_c, current })
}

/// Real nodewise s · Φ_j* K Φ_j for Hermitian K.
fn quadratic_form<const N: usize>(field: &SpinorField, k: &CMat<N>, s: f64) -> Result<Vec<f64>> {
    let comps: Vec<&[Complex64]> = (0..N).map(|c| field.component(c)).collect();
    Ok((0..field.nodes())
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..N {
                for cc in 0..N {
                    acc += comps[r][j].conj() * k[(r, cc)] * comps[cc][j];
                }
            }
            s * acc.re
        })
        .collect())
}

/// Continuous energy evaluated with spectral derivatives and the
/// trapezoidal rule:
/// ∫ -(i/ε) Σ_k Φ* K_k ∂_k Φ + (1/ε²) Φ* M Φ + V|Φ|² - Σ_k A_k Φ* K_k Φ dx.
pub fn energy_continuous(field: &SpinorField, potentials: &PotentialSet, eps: f64) -> Result<f64> {
    validate_eps(eps)?;
    if !potentials.is_time_independent() {
        return Err(Error::Contract("continuous energy needs time-independent potentials".into()));
    }
    match field.ncomp() {
        2 => energy_generic::<2>(field, potentials, eps),
        4 => energy_generic::<4>(field, potentials, eps),
        n => Err(Error::arg("field", format!("unsupported component count {n}"))),
    }
}

fn energy_generic<const N: usize>(field: &SpinorField, potentials: &PotentialSet, eps: f64) -> Result<f64> {
    let grid = *field.grid();
    let plan = SpectralPlan::new(grid);
    let pot = sample_potential(potentials, 0.0, &grid)?;
    let n = field.nodes();
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let comps: Vec<&[Complex64]> = (0..N).map(|c| field.component(c)).collect();
    let form = |k: &CMat<N>, x: &[&[Complex64]], y: &[&[Complex64]], j: usize| {
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..N {
            for cc in 0..N {
                if k[(r, cc)] != Complex64::new(0.0, 0.0) {
                    acc += x[r][j].conj() * k[(r, cc)] * y[cc][j];
                }
            }
        }
        acc
    };
    for axis in 0..grid.dim() {
        let d = plan.derivative(field, axis)?;
        let dc: Vec<&[Complex64]> = (0..N).map(|c| d.component(c)).collect();
        let k = kinetic_matrix::<N>(axis)?;
        for j in 0..n {
            let t = form(&k, &comps, &dc, j) * Complex64::new(0.0, -1.0 / eps);
            total += t;
            scale += t.norm();
        }
    }
    let m = mass_matrix::<N>()?;
    let kmats: Vec<CMat<N>> = (0..pot.a.len()).map(kinetic_matrix::<N>).collect::<Result<_>>()?;
    for j in 0..n {
        let rest = form(&m, &comps, &comps, j) / (eps * eps);
        let dens: f64 = comps.iter().map(|c| c[j].norm_sqr()).sum();
        let mut t = rest + pot.v[j] * dens;
        for (k, km) in kmats.iter().enumerate() {
            t -= pot.a[k][j] * form(km, &comps, &comps, j);
        }
        total += t;
        scale += t.norm();
    }
    let w = grid.weight();
    if total.im.abs() * w > 1e-10 * (scale * w).max(1.0) {
        return Err(Error::Numerical(format!("energy has imaginary part {:.3e}", total.im * w)));
    }
    Ok(total.re * w)
}

/// Snapshot of the physical diagnostics at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub t: f64,
    pub mass: f64,
    pub energy: Option<f64>,
    pub density: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub current: Vec<Vec<f64>>,
}

impl ObservableReport {
    pub fn new(field: &SpinorField, t: f64, eps: f64, potentials: Option<&PotentialSet>) -> Result<Self> {
        let dc = density_current(field, eps)?;
        let energy = match potentials {
            Some(p) if p.is_time_independent() => Some(energy_continuous(field, p, eps)?),
            _ => None,
        };
        Ok(Self { t, mass: mass(field), energy, density: dc.rho_c, rho: dc.rho, current: dc.current })
    }
}
