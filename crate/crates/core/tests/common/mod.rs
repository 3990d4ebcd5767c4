//! Dense reference operators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dirac_core::grid::Grid1D;
use dirac_core::{Complex64, SpinorField};
use nalgebra::{DMatrix, DVector, Matrix2};

pub type C = Complex64;
pub type Dense = DMatrix<C>;

pub fn cx(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn sigma(k: usize) -> Matrix2<C> {
    let (o, z, i) = (cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 1.0));
    match k {
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => Matrix2::identity(),
    }
}

/// σ ⊗ op with component-major ordering (index c·M + j).
pub fn kron(s: &Matrix2<C>, op: &Dense) -> Dense {
    let m = op.nrows();
    let mut out = Dense::zeros(2 * m, 2 * m);
    for r in 0..2 {
        for c in 0..2 {
            if s[(r, c)] != cx(0.0, 0.0) {
                out.view_mut((r * m, c * m), (m, m)).copy_from(&(op * s[(r, c)]));
            }
        }
    }
    out
}

pub fn diag(values: &[f64]) -> Dense {
    Dense::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| cx(v, 0.0))))
}

/// Periodic central difference (u_{j+1} - u_{j-1}) / 2h.
pub fn central_diff(m: usize, h: f64) -> Dense {
    let mut d = Dense::zeros(m, m);
    for j in 0..m {
        d[(j, (j + 1) % m)] += cx(0.5 / h, 0.0);
        d[(j, (j + m - 1) % m)] -= cx(0.5 / h, 0.0);
    }
    d
}

/// Fourier differentiation matrix on frequencies μ_l, l = -M/2..M/2-1.
pub fn spectral_diff(g: &Grid1D) -> Dense {
    let m = g.m();
    let mut d = Dense::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            let mut acc = cx(0.0, 0.0);
            for l in -(m as i64) / 2..(m as i64) / 2 {
                let mu = 2.0 * PI * l as f64 / g.len();
                acc += cx(0.0, mu) * C::from_polar(1.0, mu * (g.node(j) - g.node(k))) / m as f64;
            }
            d[(j, k)] = acc;
        }
    }
    d
}

/// -(i/ε)σ_1 D + σ_3/ε² + V - Aσ_1 for a given first-derivative matrix D.
pub fn hamiltonian(d: &Dense, eps: f64, v: &[f64], a: &[f64]) -> Dense {
    let m = d.nrows();
    let id = Dense::identity(m, m);
    kron(&sigma(1), d) * cx(0.0, -1.0 / eps) + kron(&sigma(3), &id) * cx(1.0 / (eps * eps), 0.0)
        + kron(&sigma(0), &diag(v))
        - kron(&sigma(1), &diag(a))
}

pub fn to_vec(f: &SpinorField) -> DVector<C> {
    DVector::from_column_slice(f.data())
}

/// max |x - y| / max(1, max |y|).
pub fn rel_diff(x: &[C], y: &[C]) -> f64 {
    let scale = y.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())) / scale
}

/// Composite Simpson rule for a matrix-valued integrand on [0, t].
pub fn simpson_matrix(f: impl Fn(f64) -> Matrix2<C>, t: f64, panels: usize) -> Matrix2<C> {
    let n = 2 * panels;
    let dh = t / n as f64;
    let mut acc = f(0.0) + f(t);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(k as f64 * dh) * cx(w, 0.0);
    }
    acc * cx(dh / 3.0, 0.0)
}
