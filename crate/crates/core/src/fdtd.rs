//! Finite-difference time-domain integrators for the 1D two-component model.
//!
//! All four schemes use the central difference δ_x Φ_j = (Φ_{j+1} - Φ_{j-1})/2h
//! with periodic wrap. With B = σ_3/ε² + V - Aσ_1 they read
//!
//! ```text
//! LFFD   i δ_t Φⁿ  = -(i/ε)σ_1 δ_x Φⁿ + B Φⁿ
//! SIFD1  i δ_t Φⁿ  = -(i/ε)σ_1 δ_x Φⁿ + B (Φⁿ⁺¹ + Φⁿ⁻¹)/2
//! SIFD2  i δ_t Φⁿ  = [-(i/ε)σ_1 δ_x + σ_3/ε²](Φⁿ⁺¹ + Φⁿ⁻¹)/2 + Gⁿ Φⁿ
//! CNFD   i δ_t⁺ Φⁿ = [-(i/ε)σ_1 δ_x + B^{n+1/2}] (Φⁿ⁺¹ + Φⁿ)/2
//! ```
//!
//! where δ_t is the centred and δ_t⁺ the forward difference. The three
//! two-step schemes start from a first step that is uniformly bounded in ε.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{c, re, CMat2, CMat4, CVec2, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::grid::{Grid, Grid1D};
use crate::par::{self, Exec};
use crate::params::SimParams;
use crate::potential::{sample_potential, PotentialSample, PotentialSet};
use crate::scheme::{Scheme, Stepper};
use crate::spectral::SpectralPlan;

type C = Complex64;

fn grid_1d(field: &SpinorField) -> Result<Grid1D> {
    match field.grid() {
        Grid::D1(g) if field.ncomp() == 2 => Ok(*g),
        _ => Err(Error::arg("field", "finite-difference schemes need a 1D two-component field")),
    }
}

#[inline]
fn wrap(j: usize, m: usize, plus: bool) -> usize {
    if plus {
        if j + 1 == m {
            0
        } else {
            j + 1
        }
    } else if j == 0 {
        m - 1
    } else {
        j - 1
    }
}

/// Φ¹ from Φ⁰ with sin(τ/ε) and sin(τ/ε²) replacing τ/ε and τ/ε².
pub fn first_step(params: &SimParams) -> Result<SpinorField> {
    let phi0 = &params.initial;
    let g = grid_1d(phi0)?;
    let derivative = match &params.initial_derivative {
        Some(d) => d.clone(),
        None => SpectralPlan::new(Grid::D1(g)).derivative(phi0, 0)?,
    };
    let pot = sample_potential(&params.potentials, 0.0, &Grid::D1(g))?;
    Ok(first_step_kernel(phi0, &derivative, &pot, params.eps, params.tau))
}

pub(crate) fn first_step_kernel(
    phi0: &SpinorField,
    d0: &SpinorField,
    pot: &PotentialSample,
    eps: f64,
    tau: f64,
) -> SpinorField {
    let s1 = (tau / eps).sin();
    let s2 = (tau / (eps * eps)).sin();
    let (u, w) = phi0.pair();
    let (du, dw) = d0.pair();
    let mut out = phi0.clone();
    let (ou, ow) = out.pair_mut();
    for j in 0..u.len() {
        let (v, a) = (pot.v[j], pot.a(0, j));
        // -i (s2 σ3 + τV - τAσ1) Φ
        let gu = s2 * u[j] + tau * v * u[j] - tau * a * w[j];
        let gw = -s2 * w[j] + tau * v * w[j] - tau * a * u[j];
        ou[j] = u[j] - s1 * dw[j] - I * gu;
        ow[j] = w[j] - s1 * du[j] - I * gw;
    }
    out
}

/// Applies H = -(i/ε)σ_1 δ_x + σ_3/ε² + V - Aσ_1 at node j.
#[inline]
fn apply_h(u: &[C], w: &[C], j: usize, inv_2h: f64, eps: f64, v: f64, a: f64) -> (C, C) {
    let m = u.len();
    let (jp, jm) = (wrap(j, m, true), wrap(j, m, false));
    let dxu = (u[jp] - u[jm]) * inv_2h;
    let dxw = (w[jp] - w[jm]) * inv_2h;
    let k = -I / eps;
    let e2 = 1.0 / (eps * eps);
    (
        k * dxw + (e2 + v) * u[j] - a * w[j],
        k * dxu + (v - e2) * w[j] - a * u[j],
    )
}

/// Φⁿ⁺¹ = Φⁿ⁻¹ - 2iτ H Φⁿ.
pub fn lffd_update(prev: &SpinorField, cur: &SpinorField, pot: &PotentialSample, eps: f64, tau: f64, exec: Exec) -> SpinorField {
    let h = grid_1d(cur).expect("1D field").h();
    let inv_2h = 0.5 / h;
    let (u, w) = cur.pair();
    let mut out = prev.clone();
    let (ou, ow) = out.pair_mut();
    let k = c(0.0, -2.0 * tau);
    par::zip2(exec, ou, ow, |j, x, y| {
        let (hu, hw) = apply_h(u, w, j, inv_2h, eps, pot.v[j], pot.a(0, j));
        *x += k * hu;
        *y += k * hw;
    });
    out
}

/// Nodal matrix B = σ_3/ε² + V - Aσ_1.
#[inline]
fn b_matrix(eps: f64, v: f64, a: f64) -> CMat2 {
    let e2 = 1.0 / (eps * eps);
    CMat2::new(re(e2 + v), re(-a), re(-a), re(v - e2))
}

#[inline]
fn solve2(m: &CMat2, r: CVec2) -> CVec2 {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    CVec2::new(
        (m[(1, 1)] * r[0] - m[(0, 1)] * r[1]) / det,
        (m[(0, 0)] * r[1] - m[(1, 0)] * r[0]) / det,
    )
}

#[inline]
fn inv2(m: &CMat2) -> CMat2 {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    CMat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det
}

/// [iI - τB] Φⁿ⁺¹ = [iI + τB] Φⁿ⁻¹ - (2iτ/ε) σ_1 δ_x Φⁿ, nodewise.
pub fn sifd1_update(prev: &SpinorField, cur: &SpinorField, pot: &PotentialSample, eps: f64, tau: f64, exec: Exec) -> SpinorField {
    let h = grid_1d(cur).expect("1D field").h();
    let inv_2h = 0.5 / h;
    let (u, w) = cur.pair();
    let mut out = prev.clone();
    let (ou, ow) = out.pair_mut();
    let m = u.len();
    let k = c(0.0, -2.0 * tau / eps);
    par::zip2(exec, ou, ow, |j, x, y| {
        let (jp, jm) = (wrap(j, m, true), wrap(j, m, false));
        let dxu = (u[jp] - u[jm]) * inv_2h;
        let dxw = (w[jp] - w[jm]) * inv_2h;
        let b = b_matrix(eps, pot.v[j], pot.a(0, j)) * re(tau);
        let id = CMat2::identity() * I;
        let rhs = (id + b) * CVec2::new(*x, *y) + CVec2::new(k * dxw, k * dxu);
        let sol = solve2(&(id - b), rhs);
        *x = sol[0];
        *y = sol[1];
    });
    out
}

/// Stencil symbols s_l = sin(μ_l h)/h in natural mode order.
pub fn stencil_symbols(grid: &Grid1D) -> Vec<f64> {
    let h = grid.h();
    grid.freqs().into_iter().map(|mu| (mu * h).sin() / h).collect()
}

/// Per-mode (iI - τL_l) Φ̃ⁿ⁺¹ = (iI + τL_l) Φ̃ⁿ⁻¹ + 2τ (GⁿΦⁿ)~ with
/// L_l = (s_l/ε) σ_1 + σ_3/ε².
#[allow(clippy::too_many_arguments)]
pub fn sifd2_update(
    prev: &SpinorField,
    cur: &SpinorField,
    pot: &PotentialSample,
    eps: f64,
    tau: f64,
    plan: &SpectralPlan,
    symbols: &[f64],
    exec: Exec,
) -> SpinorField {
    let mut gphi = cur.clone();
    {
        let (u, w) = gphi.pair_mut();
        par::zip2(exec, u, w, |j, x, y| {
            let (v, a) = (pot.v[j], pot.a(0, j));
            let (xu, xw) = (*x, *y);
            *x = v * xu - a * xw;
            *y = v * xw - a * xu;
        });
    }
    let gm = plan.analyze(&gphi);
    let mut pm = plan.analyze(prev);
    let (gu, gw) = gm.pair();
    let (pu, pw) = pm.pair_mut();
    let e2 = 1.0 / (eps * eps);
    par::zip2(exec, pu, pw, |l, x, y| {
        let s = symbols[l] / eps;
        let lm = CMat2::new(re(e2), re(s), re(s), re(-e2)) * re(tau);
        let id = CMat2::identity() * I;
        let rhs = (id + lm) * CVec2::new(*x, *y) + CVec2::new(gu[l], gw[l]) * re(2.0 * tau);
        let sol = solve2(&(id - lm), rhs);
        *x = sol[0];
        *y = sol[1];
    });
    plan.synthesize(&pm)
}

/// Factored Crank-Nicolson system for one (τ, ε, h, V, A) combination.
///
/// The matrix is block cyclic tridiagonal with 2x2 blocks
/// D_j = I + (iτ/2) B_j, upper cσ_1 and lower -cσ_1 where c = τ/(4εh).
/// The non-periodic part is eliminated by block Thomas; the two corner
/// blocks are folded back in with a rank-4 Woodbury correction.
#[derive(Debug, Clone)]
pub struct CnfdSystem {
    eps: f64,
    tau: f64,
    h: f64,
    diag: Vec<CMat2>,
    s_inv: Vec<CMat2>,
    cprime: Vec<CMat2>,
    upper: CMat2,
    lower: CMat2,
    /// T⁻¹W, four columns of node-major 2-vectors.
    tw: [Vec<CVec2>; 4],
    cap_inv: CMat4,
}

impl CnfdSystem {
    pub fn new(grid: &Grid1D, pot: &PotentialSample, eps: f64, tau: f64) -> Result<Self> {
        let m = grid.m();
        let h = grid.h();
        let cc = tau / (4.0 * eps * h);
        let s1 = CMat2::new(ZERO, ONE, ONE, ZERO);
        let upper = s1 * re(cc);
        let lower = s1 * re(-cc);
        let half = c(0.0, 0.5 * tau);
        let diag: Vec<CMat2> =
            (0..m).map(|j| CMat2::identity() + b_matrix(eps, pot.v[j], pot.a(0, j)) * half).collect();
        let mut s_inv = Vec::with_capacity(m);
        let mut cprime = Vec::with_capacity(m);
        for j in 0..m {
            let s = if j == 0 { diag[0] } else { diag[j] - lower * cprime[j - 1] };
            let si = inv2(&s);
            if !si.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Numerical(format!("singular Schur complement at block {j}")));
            }
            cprime.push(si * upper);
            s_inv.push(si);
        }
        let mut sys = Self {
            eps,
            tau,
            h,
            diag,
            s_inv,
            cprime,
            upper,
            lower,
            tw: [vec![], vec![], vec![], vec![]],
            cap_inv: CMat4::identity(),
        };
        // W = [E_0 L, E_{M-1} U], Z = [E_{M-1}, E_0]
        let mut tw: [Vec<CVec2>; 4] = [vec![], vec![], vec![], vec![]];
        for (col, slot) in tw.iter_mut().enumerate() {
            let mut rhs = vec![CVec2::zeros(); m];
            if col < 2 {
                rhs[0] = lower.column(col).into_owned();
            } else {
                rhs[m - 1] += upper.column(col - 2).into_owned();
            }
            *slot = sys.thomas(&rhs);
        }
        let mut cap = CMat4::identity();
        for col in 0..4 {
            let v = &tw[col];
            // Zᵀ v = (v_{M-1}, v_0)
            cap[(0, col)] += v[m - 1][0];
            cap[(1, col)] += v[m - 1][1];
            cap[(2, col)] += v[0][0];
            cap[(3, col)] += v[0][1];
        }
        sys.cap_inv = cap
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular Woodbury capacitance matrix".into()))?;
        sys.tw = tw;
        Ok(sys)
    }

    fn thomas(&self, r: &[CVec2]) -> Vec<CVec2> {
        let m = r.len();
        let mut y = Vec::with_capacity(m);
        for j in 0..m {
            let rj = if j == 0 { r[0] } else { r[j] - self.lower * y[j - 1] };
            y.push(self.s_inv[j] * rj);
        }
        for j in (0..m - 1).rev() {
            let next = y[j + 1];
            y[j] -= self.cprime[j] * next;
        }
        y
    }

    /// A x for node-major x.
    pub fn apply(&self, x: &[CVec2]) -> Vec<CVec2> {
        let m = x.len();
        (0..m)
            .map(|j| self.diag[j] * x[j] + self.upper * x[wrap(j, m, true)] + self.lower * x[wrap(j, m, false)])
            .collect()
    }

    /// Solves A x = r.
    pub fn solve(&self, r: &[CVec2]) -> Result<Vec<CVec2>> {
        let m = r.len();
        let mut y = self.thomas(r);
        let zy = nalgebra::SVector::<C, 4>::new(y[m - 1][0], y[m - 1][1], y[0][0], y[0][1]);
        let coef = self.cap_inv * zy;
        for (col, v) in self.tw.iter().enumerate() {
            let k = coef[col];
            for (yj, vj) in y.iter_mut().zip(v) {
                *yj -= vj * k;
            }
        }
        let ax = self.apply(&y);
        let res: f64 = ax.iter().zip(r).map(|(a, b)| (a - b).norm_squared()).sum::<f64>().sqrt();
        let rn: f64 = r.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
        if !(res <= 1e-10 * rn.max(f64::MIN_POSITIVE)) && rn > 0.0 {
            return Err(Error::Numerical(format!(
                "Crank-Nicolson residual {res:.3e} exceeds 1e-10 * |rhs| = {:.3e}",
                1e-10 * rn
            )));
        }
        Ok(y)
    }

    /// Right-hand side (I - iτ/2 H) Φⁿ.
    pub fn rhs(&self, cur: &SpinorField, pot: &PotentialSample) -> Vec<CVec2> {
        let (u, w) = cur.pair();
        let m = u.len();
        let half = c(0.0, -0.5 * self.tau);
        let cc = self.tau / (4.0 * self.eps * self.h);
        (0..m)
            .map(|j| {
                let (jp, jm) = (wrap(j, m, true), wrap(j, m, false));
                let b = CMat2::identity() + b_matrix(self.eps, pot.v[j], pot.a(0, j)) * half;
                let x = b * CVec2::new(u[j], w[j]);
                // -cσ_1 Φ_{j+1} + cσ_1 Φ_{j-1}
                CVec2::new(x[0] - cc * (w[jp] - w[jm]), x[1] - cc * (u[jp] - u[jm]))
            })
            .collect()
    }
}

pub(crate) fn from_nodes(grid: Grid, x: &[CVec2]) -> SpinorField {
    let mut data = Vec::with_capacity(2 * x.len());
    data.extend(x.iter().map(|v| v[0]));
    data.extend(x.iter().map(|v| v[1]));
    SpinorField::from_raw(grid, 2, data)
}

/// (I + iτ/2 H) Φⁿ⁺¹ = (I - iτ/2 H) Φⁿ with potentials at t_n + τ/2.
pub fn cnfd_update(cur: &SpinorField, pot_half: &PotentialSample, eps: f64, tau: f64) -> Result<SpinorField> {
    let g = grid_1d(cur)?;
    let sys = CnfdSystem::new(&g, pot_half, eps, tau)?;
    let x = sys.solve(&sys.rhs(cur, pot_half))?;
    Ok(from_nodes(*cur.grid(), &x))
}

/// Admissible step size for a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityBound {
    Limited(f64),
    Unconditional,
}

impl StabilityBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            StabilityBound::Limited(t) => Some(*t),
            StabilityBound::Unconditional => None,
        }
    }
}

/// Step-size bound under constant-potential linear stability analysis.
///
/// The EWI entry (τ ≤ 1) is the heuristic regime the integrator is known
/// to be stable in, not a sharp bound.
pub fn stability_bound(scheme: Scheme, eps: f64, h: f64, vmax: f64, amax: f64) -> Result<StabilityBound> {
    crate::params::validate_eps(eps)?;
    if !(h > 0.0) {
        return Err(Error::arg("h", format!("must be positive, got {h}")));
    }
    let (v, a) = (vmax.abs(), amax.abs());
    Ok(match scheme {
        Scheme::Lffd => {
            let e2h = eps * eps * h;
            StabilityBound::Limited(e2h / (v * e2h + (h * h + eps * eps * (1.0 + eps * h * a).powi(2)).sqrt()))
        }
        Scheme::Sifd1 => StabilityBound::Limited(eps * h),
        Scheme::Sifd2 => {
            if v + a == 0.0 {
                StabilityBound::Unconditional
            } else {
                StabilityBound::Limited(1.0 / (v + a))
            }
        }
        Scheme::EwiFp => StabilityBound::Limited(1.0),
        Scheme::Cnfd | Scheme::Tsfp => StabilityBound::Unconditional,
    })
}

/// Discrete energy conserved by CNFD:
/// h Σ_j [-(i/ε) Φ_j* σ_1 δ_x Φ_j + (1/ε²) Φ_j* σ_3 Φ_j + V_j |Φ_j|² - A_j Φ_j* σ_1 Φ_j].
pub fn discrete_energy_fdtd(field: &SpinorField, potentials: &PotentialSet, eps: f64) -> Result<f64> {
    if !potentials.is_time_independent() {
        return Err(Error::Contract("discrete energy needs time-independent potentials".into()));
    }
    let g = grid_1d(field)?;
    let pot = sample_potential(potentials, 0.0, &Grid::D1(g))?;
    let (u, w) = field.pair();
    let m = u.len();
    let inv_2h = 0.5 / g.h();
    let mut sum = C::new(0.0, 0.0);
    let mut scale = 0.0;
    for j in 0..m {
        let (jp, jm) = (wrap(j, m, true), wrap(j, m, false));
        let dxu = (u[jp] - u[jm]) * inv_2h;
        let dxw = (w[jp] - w[jm]) * inv_2h;
        let kin = -I / eps * (u[j].conj() * dxw + w[j].conj() * dxu);
        let mass = (u[j].norm_sqr() - w[j].norm_sqr()) / (eps * eps);
        let pv = pot.v[j] * (u[j].norm_sqr() + w[j].norm_sqr());
        let pa = -pot.a(0, j) * 2.0 * (u[j].conj() * w[j]).re;
        sum += kin + mass + pv + pa;
        scale += kin.norm() + mass.abs() + pv.abs() + pa.abs();
    }
    let e = sum * g.h();
    if e.im.abs() > 1e-12 * (scale * g.h()).max(1.0) {
        return Err(Error::Numerical(format!("discrete energy has imaginary part {:.3e}", e.im)));
    }
    Ok(e.re)
}

/// Replayable state of one finite-difference integrator.
#[derive(Debug, Clone)]
pub struct FdtdState {
    scheme: Scheme,
    current: SpinorField,
    previous: Option<SpinorField>,
    n: usize,
    t: f64,
    tau: f64,
    params: SimParams,
    frozen: Option<PotentialSample>,
    plan: Option<SpectralPlan>,
    symbols: Vec<f64>,
    cnfd: Option<CnfdSystem>,
    exec: Exec,
}

impl FdtdState {
    pub fn new(scheme: Scheme, params: SimParams) -> Result<Self> {
        if !scheme.is_fdtd() {
            return Err(Error::arg("scheme", format!("{scheme} is not a finite-difference scheme")));
        }
        params.validate()?;
        let g = grid_1d(&params.initial)?;
        let frozen = if params.potentials.is_time_independent() {
            Some(sample_potential(&params.potentials, 0.0, &Grid::D1(g))?)
        } else {
            None
        };
        let (plan, symbols) = if scheme == Scheme::Sifd2 {
            (Some(SpectralPlan::new(Grid::D1(g))), stencil_symbols(&g))
        } else {
            (None, vec![])
        };
        Ok(Self {
            scheme,
            current: params.initial.clone(),
            previous: None,
            n: 0,
            t: 0.0,
            tau: params.tau,
            params,
            frozen,
            plan,
            symbols,
            cnfd: None,
            exec: Exec::default(),
        })
    }

    /// State with both history levels given, as if `n` steps had been taken.
    pub fn from_levels(scheme: Scheme, params: SimParams, previous: SpinorField, current: SpinorField, n: usize) -> Result<Self> {
        let mut s = Self::new(scheme, params)?;
        if !previous.same_shape(&current) || !current.same_shape(&s.current) {
            return Err(Error::arg("levels", "history levels differ in shape"));
        }
        s.t = n as f64 * s.tau;
        s.previous = Some(previous);
        s.current = current;
        s.n = n;
        Ok(s)
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn previous(&self) -> Option<&SpinorField> {
        self.previous.as_ref()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Flips the direction of time: τ → -τ and the two history levels swap.
    pub fn reverse(&mut self) {
        self.tau = -self.tau;
        self.cnfd = None;
        if self.scheme != Scheme::Cnfd {
            if let Some(prev) = self.previous.take() {
                let cur = std::mem::replace(&mut self.current, prev);
                self.previous = Some(cur);
                self.t += self.tau;
            }
        }
    }

    fn potentials_at(&self, t: f64) -> Result<PotentialSample> {
        match &self.frozen {
            Some(p) => Ok(p.clone()),
            None => sample_potential(&self.params.potentials, t, self.current.grid()),
        }
    }

    fn advance(&mut self) -> Result<SpinorField> {
        let (eps, tau) = (self.params.eps, self.tau);
        if self.scheme == Scheme::Cnfd {
            if let Some(pot) = &self.frozen {
                if self.cnfd.is_none() {
                    let g = grid_1d(&self.current)?;
                    self.cnfd = Some(CnfdSystem::new(&g, pot, eps, tau)?);
                }
                let sys = self.cnfd.as_ref().unwrap();
                let x = sys.solve(&sys.rhs(&self.current, pot))?;
                return Ok(from_nodes(*self.current.grid(), &x));
            }
            let pot = self.potentials_at(self.t + 0.5 * tau)?;
            return cnfd_update(&self.current, &pot, eps, tau);
        }
        let Some(prev) = &self.previous else {
            let mut p = self.params.clone();
            p.tau = tau;
            return first_step_from(&p, self.t, &self.current, &self.potentials_at(self.t)?);
        };
        let pot = self.potentials_at(self.t)?;
        Ok(match self.scheme {
            Scheme::Lffd => lffd_update(prev, &self.current, &pot, eps, tau, self.exec),
            Scheme::Sifd1 => sifd1_update(prev, &self.current, &pot, eps, tau, self.exec),
            Scheme::Sifd2 => sifd2_update(
                prev,
                &self.current,
                &pot,
                eps,
                tau,
                self.plan.as_ref().expect("plan built for SIFD2"),
                &self.symbols,
                self.exec,
            ),
            _ => unreachable!("checked in new"),
        })
    }
}

fn first_step_from(params: &SimParams, t: f64, cur: &SpinorField, pot: &PotentialSample) -> Result<SpinorField> {
    let d = if t == 0.0 && params.initial_derivative.is_some() {
        params.initial_derivative.clone().unwrap()
    } else {
        SpectralPlan::new(*cur.grid()).derivative(cur, 0)?
    };
    Ok(first_step_kernel(cur, &d, pot, params.eps, params.tau))
}

impl Stepper for FdtdState {
    fn scheme(&self) -> Scheme {
        self.scheme
    }

    fn step(&mut self) -> Result<()> {
        let next = self.advance()?;
        if self.scheme == Scheme::Cnfd {
            self.current = next;
        } else {
            let cur = std::mem::replace(&mut self.current, next);
            self.previous = Some(cur);
        }
        self.n += 1;
        self.t += self.tau;
        Ok(())
    }

    fn current(&self) -> &SpinorField {
        &self.current
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn steps_taken(&self) -> usize {
        self.n
    }

    fn params(&self) -> &SimParams {
        &self.params
    }
}
