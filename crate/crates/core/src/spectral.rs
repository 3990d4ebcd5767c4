//! Discrete Fourier analysis and synthesis of spinor fields.
//!
//! Coefficients use the 1/M-normalized forward transform
//! `Ũ_l = (1/M) Σ_j U_j e^{-2πi jl/M}` and are stored in natural order
//! l = -M/2, ..., M/2 - 1 (index l + M/2). Two-dimensional transforms are
//! tensor products of 1D transforms, with mode (j, k) at
//! `(j + M1/2) * M2 + (k + M2/2)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::grid::{Grid, Grid1D};
use crate::par::{self, Exec};

/// Transform backend.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Fft,
    /// O(M²) direct summation.
    Direct,
}

/// Mode coefficients of a spinor field, natural frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoeffs {
    grid: Grid,
    ncomp: usize,
    data: Vec<Complex64>,
}

impl ModeCoeffs {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        Self { grid, ncomp, data: vec![Complex64::new(0.0, 0.0); ncomp * grid.nodes()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn modes(&self) -> usize {
        self.grid.nodes()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.modes();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.modes();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn pair(&self) -> (&[Complex64], &[Complex64]) {
        self.data.split_at(self.modes())
    }

    pub fn pair_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        let n = self.modes();
        self.data.split_at_mut(n)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Coefficient of component `c` at frequency index `l` (1D).
    pub fn get_1d(&self, c: usize, l: i64) -> Complex64 {
        let m = self.modes() as i64;
        self.data[c * self.modes() + (l + m / 2) as usize]
    }

    pub fn set_1d(&mut self, c: usize, l: i64, z: Complex64) {
        let m = self.modes() as i64;
        let n = self.modes();
        self.data[c * n + (l + m / 2) as usize] = z;
    }

    /// Σ_l |Ũ_l|² over all components.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Direct evaluation of the forward transform, natural order output.
pub fn naive_dft(u: &[Complex64]) -> Vec<Complex64> {
    let m = u.len();
    let half = (m / 2) as i64;
    (-half..half)
        .map(|l| {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &uj) in u.iter().enumerate() {
                let k = (j as i64 * l).rem_euclid(m as i64) as f64;
                s += uj * Complex64::from_polar(1.0, -2.0 * PI * k / m as f64);
            }
            s / m as f64
        })
        .collect()
}

/// Direct evaluation of the inverse transform from natural order input.
pub fn naive_idft(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len();
    let half = (m / 2) as i64;
    (0..m)
        .map(|j| {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, &cl) in c.iter().enumerate() {
                let l = i as i64 - half;
                let k = (j as i64 * l).rem_euclid(m as i64) as f64;
                s += cl * Complex64::from_polar(1.0, 2.0 * PI * k / m as f64);
            }
            s
        })
        .collect()
}

#[derive(Clone)]
struct AxisPlan {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl AxisPlan {
    fn new(planner: &mut FftPlanner<f64>, m: usize) -> Self {
        Self { m, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) }
    }

    /// Forward transform of consecutive length-M rows, natural order out.
    fn forward_rows(&self, backend: Transform, rows: &mut [Complex64]) {
        let m = self.m;
        match backend {
            Transform::Fft => {
                let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
                self.forward.process_with_scratch(rows, &mut scratch);
                let s = 1.0 / m as f64;
                for row in rows.chunks_mut(m) {
                    row.iter_mut().for_each(|z| *z *= s);
                    row.rotate_left(m / 2);
                }
            }
            Transform::Direct => {
                for row in rows.chunks_mut(m) {
                    let out = naive_dft(row);
                    row.copy_from_slice(&out);
                }
            }
        }
    }

    fn inverse_rows(&self, backend: Transform, rows: &mut [Complex64]) {
        let m = self.m;
        match backend {
            Transform::Fft => {
                for row in rows.chunks_mut(m) {
                    row.rotate_left(m / 2);
                }
                let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
                self.inverse.process_with_scratch(rows, &mut scratch);
            }
            Transform::Direct => {
                for row in rows.chunks_mut(m) {
                    let out = naive_idft(row);
                    row.copy_from_slice(&out);
                }
            }
        }
    }
}

/// Reusable transform plan for one grid. Immutable and shareable.
#[derive(Clone)]
pub struct SpectralPlan {
    grid: Grid,
    backend: Transform,
    exec: Exec,
    x: AxisPlan,
    y: Option<AxisPlan>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).field("backend", &self.backend).finish()
    }
}

const ROW_BLOCK: usize = 16;

impl SpectralPlan {
    pub fn new(grid: Grid) -> Self {
        Self::with_backend(grid, Transform::Fft)
    }

    pub fn with_backend(grid: Grid, backend: Transform) -> Self {
        let mut planner = FftPlanner::new();
        let (x, y) = match grid {
            Grid::D1(g) => (AxisPlan::new(&mut planner, g.m()), None),
            Grid::D2(g) => {
                (AxisPlan::new(&mut planner, g.x.m()), Some(AxisPlan::new(&mut planner, g.y.m())))
            }
        };
        Self { grid, backend, exec: Exec::default(), x, y }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn transform_component(&self, buf: &mut [Complex64], forward: bool) {
        let backend = self.backend;
        let run = |plan: &AxisPlan, rows: &mut [Complex64]| {
            if forward {
                plan.forward_rows(backend, rows)
            } else {
                plan.inverse_rows(backend, rows)
            }
        };
        match &self.y {
            None => run(&self.x, buf),
            Some(py) => {
                let (m1, m2) = (self.x.m, py.m);
                par::each_chunk(self.exec, buf, m2 * ROW_BLOCK, |_, rows| run(py, rows));
                let mut t = transpose(buf, m1, m2);
                par::each_chunk(self.exec, &mut t, m1 * ROW_BLOCK, |_, rows| run(&self.x, rows));
                buf.copy_from_slice(&transpose(&t, m2, m1));
            }
        }
    }

    pub fn analyze_into(&self, u: &SpinorField, out: &mut ModeCoeffs) {
        assert_eq!(u.grid(), &self.grid, "field grid differs from plan grid");
        out.grid = self.grid;
        out.ncomp = u.ncomp();
        out.data.clear();
        out.data.extend_from_slice(u.data());
        let n = self.grid.nodes();
        for c in 0..u.ncomp() {
            self.transform_component(&mut out.data[c * n..(c + 1) * n], true);
        }
    }

    pub fn analyze(&self, u: &SpinorField) -> ModeCoeffs {
        let mut out = ModeCoeffs::zeros(self.grid, u.ncomp());
        self.analyze_into(u, &mut out);
        out
    }

    pub fn synthesize_into(&self, c: &ModeCoeffs, out: &mut SpinorField) {
        assert_eq!(c.grid(), &self.grid, "coefficient grid differs from plan grid");
        let n = self.grid.nodes();
        if out.ncomp() != c.ncomp() || out.grid() != &self.grid {
            *out = SpinorField::zeros(self.grid, c.ncomp());
        }
        out.data_mut().copy_from_slice(&c.data);
        for k in 0..c.ncomp() {
            self.transform_component(&mut out.data_mut()[k * n..(k + 1) * n], false);
        }
    }

    pub fn synthesize(&self, c: &ModeCoeffs) -> SpinorField {
        let mut out = SpinorField::zeros(self.grid, c.ncomp());
        self.synthesize_into(c, &mut out);
        out
    }

    /// Frequency vector of flat mode index i.
    pub fn mode_freq(&self, i: usize) -> [f64; 2] {
        match self.grid {
            Grid::D1(g) => [g.freq(i as i64 - (g.m() / 2) as i64), 0.0],
            Grid::D2(g) => {
                let m2 = g.y.m();
                let (j, k) = (i / m2, i % m2);
                [g.x.freq(j as i64 - (g.x.m() / 2) as i64), g.y.freq(k as i64 - (m2 / 2) as i64)]
            }
        }
    }

    /// Per-mode frequency table, natural order.
    pub fn freq_table(&self) -> Vec<[f64; 2]> {
        (0..self.grid.nodes()).map(|i| self.mode_freq(i)).collect()
    }

    /// Spectral derivative along `axis` (0 = x, 1 = y).
    pub fn derivative(&self, u: &SpinorField, axis: usize) -> Result<SpinorField> {
        if axis >= self.grid.dim() {
            return Err(Error::arg("axis", format!("axis {axis} out of range for a {}D grid", self.grid.dim())));
        }
        let mut m = self.analyze(u);
        let n = self.grid.nodes();
        for c in 0..m.ncomp {
            for i in 0..n {
                let mu = self.mode_freq(i)[axis];
                m.data[c * n + i] *= Complex64::new(0.0, mu);
            }
        }
        Ok(self.synthesize(&m))
    }
}

fn transpose(a: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = a[r * cols + c];
        }
    }
    out
}

pub fn analyze(u: &SpinorField) -> ModeCoeffs {
    SpectralPlan::new(*u.grid()).analyze(u)
}

pub fn synthesize(c: &ModeCoeffs) -> SpinorField {
    SpectralPlan::new(*c.grid()).synthesize(c)
}

pub fn spectral_derivative(u: &SpinorField, axis: usize) -> Result<SpinorField> {
    SpectralPlan::new(*u.grid()).derivative(u, axis)
}

/// Evaluates the trigonometric interpolant of 1D coefficients at arbitrary x.
pub fn interpolate_1d(grid: &Grid1D, coeffs: &[Complex64], x: f64) -> Complex64 {
    let half = (grid.m() / 2) as i64;
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex64::from_polar(1.0, grid.freq(i as i64 - half) * (x - grid.a())))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_and_single_mode() {
        let g = Grid1D::new(-1.0, 3.0, 16).unwrap();
        let u = SpinorField::from_fn(Grid::D1(g), |_| [cz(2.0, -1.0), cz(0.0, 0.0)]);
        let m = analyze(&u);
        for l in -8..8 {
            let expect = if l == 0 { cz(2.0, -1.0) } else { cz(0.0, 0.0) };
            assert!((m.get_1d(0, l) - expect).norm() < 1e-14);
        }
        let mu1 = g.freq(1);
        let a = g.a();
        let w = SpinorField::from_fn(Grid::D1(g), |x| [Complex64::from_polar(1.0, mu1 * (x[0] - a)), cz(0.0, 0.0)]);
        let m = analyze(&w);
        assert!((m.get_1d(0, 1) - cz(1.0, 0.0)).norm() < 1e-14);
        assert!(m.energy() - 1.0 < 1e-14);
    }

    #[test]
    fn nyquist_mode_synthesis() {
        let g = Grid1D::new(0.0, 2.0, 8).unwrap();
        let mut c = ModeCoeffs::zeros(Grid::D1(g), 2);
        c.set_1d(0, -4, cz(1.0, 0.0));
        let u = synthesize(&c);
        for j in 0..8 {
            let direct = Complex64::from_polar(1.0, g.freq(-4) * (g.node(j) - g.a()));
            assert!((u.component(0)[j] - direct).norm() < 1e-14);
            assert!((u.component(0)[j].re - if j % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn direct_backend_agrees_2d() {
        let g = Grid::D2(Grid2D::new(Grid1D::new(0.0, 1.0, 6).unwrap(), Grid1D::new(-1.0, 1.0, 4).unwrap()));
        let u = SpinorField::from_fn(g, |x| [cz(x[0].sin(), x[1]), cz(x[0] * x[1], 1.0)]);
        let fast = SpectralPlan::new(g).analyze(&u);
        let slow = SpectralPlan::with_backend(g, Transform::Direct).analyze(&u);
        for (a, b) in fast.data().iter().zip(slow.data()) {
            assert!((a - b).norm() < 1e-14);
        }
        let back = SpectralPlan::with_backend(g, Transform::Direct).synthesize(&slow);
        for (a, b) in back.data().iter().zip(u.data()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_axis_checked() {
        let g = Grid::D1(Grid1D::new(0.0, 1.0, 4).unwrap());
        let u = SpinorField::zeros(g, 2);
        assert!(spectral_derivative(&u, 1).is_err());
    }
}
