//! Per-mode Dirac operator algebra.
//!
//! For each Fourier mode the free Dirac generator reduces to Γ/ε² with
//! Γ = ε μ·σ + σ_3 (two components) or ε μ·α + β (four components).
//! Γ is Hermitian with Γ² = δ² I and δ = sqrt(1 + ε²|μ|²), so its Schur
//! form Γ = Q D Q* has D = diag(±δ) in closed form.

use nalgebra::SVector;
use num_complex::Complex64;

use crate::algebra::{c, re, CMat, CMat2, CMat4, ONE, ZERO};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::params::validate_eps;
use crate::spectral::SpectralPlan;

/// Schur data of one mode operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator<const N: usize> {
    pub gamma: CMat<N>,
    pub q: CMat<N>,
    pub d: [f64; N],
    pub delta: f64,
    pub eps: f64,
    pub mu: [f64; 3],
}

pub fn mode_operator_1d(eps: f64, mu: f64) -> Result<ModeOperator<2>> {
    mode_operator_2d(eps, mu, 0.0)
}

pub fn mode_operator_2d(eps: f64, mu1: f64, mu2: f64) -> Result<ModeOperator<2>> {
    validate_eps(eps)?;
    let delta = (1.0 + eps * eps * (mu1 * mu1 + mu2 * mu2)).sqrt();
    let (e1, e2) = (eps * mu1, eps * mu2);
    let gamma = CMat2::new(ONE, c(e1, -e2), c(e1, e2), -ONE);
    let s = 1.0 / (2.0 * delta * (1.0 + delta)).sqrt();
    let q = CMat2::new(re(1.0 + delta), c(-e1, e2), c(e1, e2), re(1.0 + delta)) * re(s);
    Ok(ModeOperator { gamma, q, d: [delta, -delta], delta, eps, mu: [mu1, mu2, 0.0] })
}

pub fn mode_operator_3d(eps: f64, mu1: f64, mu2: f64, mu3: f64) -> Result<ModeOperator<4>> {
    validate_eps(eps)?;
    let delta = (1.0 + eps * eps * (mu1 * mu1 + mu2 * mu2 + mu3 * mu3)).sqrt();
    let (e3, p, m) = (re(eps * mu3), c(eps * mu1, eps * mu2), c(eps * mu1, -eps * mu2));
    #[rustfmt::skip]
    let gamma = CMat4::new(
        ONE,  ZERO, e3,   m,
        ZERO, ONE,  p,    -e3,
        e3,   m,    -ONE, ZERO,
        p,    -e3,  ZERO, -ONE,
    );
    let dp = re(1.0 + delta);
    let s = re(1.0 / (2.0 * delta * (1.0 + delta)).sqrt());
    #[rustfmt::skip]
    let q = CMat4::new(
        dp,   ZERO, -e3,  -m,
        ZERO, dp,   -p,   e3,
        e3,   m,    dp,   ZERO,
        p,    -e3,  ZERO, dp,
    ) * s;
    Ok(ModeOperator { gamma, q, d: [delta, delta, -delta, -delta], delta, eps, mu: [mu1, mu2, mu3] })
}

impl<const N: usize> ModeOperator<N> {
    /// Γ⁻¹ = Γ/δ².
    pub fn gamma_inv(&self) -> CMat<N> {
        self.gamma * re(1.0 / (self.delta * self.delta))
    }

    /// Q diag(g(d_i)) Q*.
    pub fn spectral_fn(&self, g: impl Fn(f64) -> Complex64) -> CMat<N> {
        let diag = SVector::<Complex64, N>::from_fn(|i, _| g(self.d[i]));
        self.q * CMat::<N>::from_diagonal(&diag) * self.q.adjoint()
    }
}

/// e^{-itΓ/ε²} = Q e^{-itD/ε²} Q*.
pub fn mode_flow<const N: usize>(op: &ModeOperator<N>, t: f64) -> CMat<N> {
    let s = t / (op.eps * op.eps);
    op.spectral_fn(|d| Complex64::from_polar(1.0, -s * d))
}

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;

/// φ1(z) = (e^z - 1)/z.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 1)
    } else {
        (z.exp() - 1.0) / z
    }
}

/// φ2(z) = (e^z - 1 - z)/z².
pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        series(z, 2)
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Σ_k z^k/(k + shift)! by Horner's rule.
fn series(z: Complex64, shift: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (0..SERIES_TERMS).rev() {
        acc = acc * z / (k + shift + 1) as f64 + 1.0;
    }
    let fact: f64 = (1..=shift).map(|i| i as f64).product();
    acc / fact
}

/// Gautschi filter matrices (Q1, Q2) for step `tau`:
/// Q1 = ∫₀^τ e^{i(w-τ)Γ/ε²} dw, Q2 = ∫₀^τ e^{i(w-τ)Γ/ε²} w dw.
pub fn ewi_filters<const N: usize>(op: &ModeOperator<N>, tau: f64) -> (CMat<N>, CMat<N>) {
    let s = tau / (op.eps * op.eps);
    let q1 = op.spectral_fn(|d| phi1(c(0.0, -s * d)) * tau);
    let q2 = op.spectral_fn(|d| phi2(c(0.0, -s * d)) * (tau * tau));
    (q1, q2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// ω(k) = V⁰ ± (1/ε²) sqrt(1 + ε²|k - εA⁰|²).
pub fn dispersion_omega(eps: f64, v0: f64, a0: &[f64], k: &[f64], branch: Branch) -> Result<f64> {
    validate_eps(eps)?;
    if a0.len() != k.len() {
        return Err(Error::arg("k", "frequency and A⁰ vectors differ in length"));
    }
    let q2: f64 = k.iter().zip(a0).map(|(k, a)| (k - eps * a).powi(2)).sum();
    let w = (1.0 + eps * eps * q2).sqrt() / (eps * eps);
    Ok(match branch {
        Branch::Plus => v0 + w,
        Branch::Minus => v0 - w,
    })
}

/// Two-component mode operator for flat mode index `i` of `plan`.
pub fn mode_operator_for(plan: &SpectralPlan, eps: f64, i: usize) -> Result<ModeOperator<2>> {
    let mu = plan.mode_freq(i);
    mode_operator_2d(eps, mu[0], mu[1])
}

/// Exact solution of the free (V = A = 0) equation at time t.
pub fn exact_free_solution(initial: &SpinorField, eps: f64, t: f64) -> Result<SpinorField> {
    validate_eps(eps)?;
    if initial.ncomp() != 2 {
        return Err(Error::arg("initial", "free flow is implemented for two-component fields"));
    }
    let plan = SpectralPlan::new(*initial.grid());
    let mut m = plan.analyze(initial);
    let (a, b) = m.pair_mut();
    for i in 0..a.len() {
        let e = mode_flow(&mode_operator_for(&plan, eps, i)?, t);
        let (x, y) = (a[i], b[i]);
        a[i] = e[(0, 0)] * x + e[(0, 1)] * y;
        b[i] = e[(1, 0)] * x + e[(1, 1)] * y;
    }
    Ok(plan.synthesize(&m))
}

/// Eigen-decomposition P Λ P* of an integrated potential matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDecomp<const N: usize> {
    pub p: CMat<N>,
    /// Ascending.
    pub lambda: [f64; N],
    pub source: CMat<N>,
}

impl<const N: usize> PhaseDecomp<N> {
    /// e^{-i source} = P e^{-iΛ} P*.
    pub fn exp_neg_i(&self) -> CMat<N> {
        let diag = SVector::<Complex64, N>::from_fn(|i, _| Complex64::from_polar(1.0, -self.lambda[i]));
        self.p * CMat::<N>::from_diagonal(&diag) * self.p.adjoint()
    }

    pub fn reconstruct(&self) -> CMat<N> {
        let diag = SVector::<Complex64, N>::from_fn(|i, _| re(self.lambda[i]));
        self.p * CMat::<N>::from_diagonal(&diag) * self.p.adjoint()
    }
}

/// a·σ for a three-vector.
fn a_dot_sigma(a: [f64; 3]) -> CMat2 {
    CMat2::new(re(a[2]), c(a[0], -a[1]), c(a[0], a[1]), re(-a[2]))
}

fn pad(a: &[f64]) -> Result<[f64; 3]> {
    if a.len() > 3 {
        return Err(Error::arg("A", format!("at most 3 components, got {}", a.len())));
    }
    let mut out = [0.0; 3];
    out[..a.len()].copy_from_slice(a);
    Ok(out)
}

/// Decomposes V1·I - Σ_k A1_k σ_k.
pub fn phase_decomp(v1: f64, a1: &[f64]) -> Result<PhaseDecomp<2>> {
    let a = pad(a1)?;
    let source = CMat2::identity() * re(v1) - a_dot_sigma(a);
    let lam = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if lam == 0.0 {
        return Ok(PhaseDecomp { p: CMat2::identity(), lambda: [v1, v1], source });
    }
    let n = [a[0] / lam, a[1] / lam, a[2] / lam];
    // +1 eigenvector of n·σ, built from whichever column avoids cancellation
    let (v0, v1c) = if n[2] >= 0.0 {
        let s = 1.0 / (2.0 * (1.0 + n[2])).sqrt();
        (re((1.0 + n[2]) * s), c(n[0] * s, n[1] * s))
    } else {
        let s = 1.0 / (2.0 * (1.0 - n[2])).sqrt();
        (c(n[0] * s, -n[1] * s), re((1.0 - n[2]) * s))
    };
    let p = CMat2::new(v0, -v1c.conj(), v1c, v0.conj());
    Ok(PhaseDecomp { p, lambda: [v1 - lam, v1 + lam], source })
}

/// Decomposes V1·I - Σ_k A1_k α_k.
pub fn phase_decomp_4(v1: f64, a1: &[f64]) -> Result<PhaseDecomp<4>> {
    let a = pad(a1)?;
    let s = a_dot_sigma(a);
    let mut a_alpha = CMat4::zeros();
    a_alpha.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
    a_alpha.fixed_view_mut::<2, 2>(2, 0).copy_from(&s);
    let source = CMat4::identity() * re(v1) - a_alpha;
    let lam = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if lam == 0.0 {
        return Ok(PhaseDecomp { p: CMat4::identity(), lambda: [v1; 4], source });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = s * re(r / lam);
    let id = CMat2::identity() * re(r);
    let mut p = CMat4::zeros();
    p.fixed_view_mut::<2, 2>(0, 0).copy_from(&id);
    p.fixed_view_mut::<2, 2>(0, 2).copy_from(&id);
    p.fixed_view_mut::<2, 2>(2, 0).copy_from(&u);
    p.fixed_view_mut::<2, 2>(2, 2).copy_from(&(-u));
    Ok(PhaseDecomp { p, lambda: [v1 - lam, v1 - lam, v1 + lam, v1 + lam], source })
}
