//! Small dense complex matrices: Pauli and Dirac matrices, norms.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat<const N: usize> = SMatrix<Complex64, N, N>;
pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;
pub type CVec<const N: usize> = SVector<Complex64, N>;
pub type CVec2 = CVec<2>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// σ_1, σ_2 or σ_3.
pub fn pauli(index: usize) -> Result<CMat2> {
    match index {
        1 => Ok(CMat2::new(ZERO, ONE, ONE, ZERO)),
        2 => Ok(CMat2::new(ZERO, -I, I, ZERO)),
        3 => Ok(CMat2::new(ONE, ZERO, ZERO, -ONE)),
        _ => Err(Error::arg("index", format!("Pauli index must be 1, 2 or 3, got {index}"))),
    }
}

/// α_j = [[0, σ_j], [σ_j, 0]].
pub fn dirac_alpha(index: usize) -> Result<CMat4> {
    let s = pauli(index)?;
    let mut m = CMat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&s);
    Ok(m)
}

/// β = diag(1, 1, -1, -1).
pub fn dirac_beta() -> CMat4 {
    CMat4::from_diagonal(&SVector::<Complex64, 4>::new(ONE, ONE, -ONE, -ONE))
}

/// The matrices multiplying ∂_j and A_j: σ_j for two components, α_j for four.
pub fn kinetic_matrix<const N: usize>(axis: usize) -> Result<CMat<N>> {
    let mut out = CMat::<N>::zeros();
    match N {
        2 => fill(&mut out, pauli(axis + 1)?.as_slice()),
        4 => fill(&mut out, dirac_alpha(axis + 1)?.as_slice()),
        _ => return Err(Error::arg("ncomp", "component count must be 2 or 4")),
    }
    Ok(out)
}

fn fill<const N: usize>(out: &mut CMat<N>, src: &[Complex64]) {
    out.as_mut_slice().copy_from_slice(src);
}

/// σ_3 for two components, β for four.
pub fn mass_matrix<const N: usize>() -> Result<CMat<N>> {
    let mut out = CMat::<N>::zeros();
    match N {
        2 => fill(&mut out, pauli(3)?.as_slice()),
        4 => fill(&mut out, dirac_beta().as_slice()),
        _ => return Err(Error::arg("ncomp", "component count must be 2 or 4")),
    }
    Ok(out)
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Spectral norm (largest singular value).
pub fn norm2<const N: usize>(m: &CMat<N>) -> f64 {
    if N == 2 {
        // closed form for 2x2: σ² = (f ± sqrt(f² - 4|det|²)) / 2
        let f = m.norm_squared();
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
        let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
        return ((f + disc) / 2.0).sqrt();
    }
    nalgebra::DMatrix::from_column_slice(N, N, m.as_slice()).singular_values().max()
}

/// ‖M* M - I‖_max.
pub fn unitarity_residual<const N: usize>(m: &CMat<N>) -> f64 {
    max_abs(&(m.adjoint() * m - CMat::<N>::identity()))
}

/// ‖M - M*‖_max.
pub fn hermiticity_residual<const N: usize>(m: &CMat<N>) -> f64 {
    max_abs(&(m - m.adjoint()))
}
