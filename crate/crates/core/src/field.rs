//! Spinor fields sampled on periodic grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex N_c-component field on the grid nodes (node M implicit).
///
/// Storage is component-major: component `c` occupies
/// `data[c * n .. (c + 1) * n]` where `n` is the node count.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    ncomp: usize,
    data: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        assert!(ncomp == 2 || ncomp == 4, "component count must be 2 or 4");
        Self { grid, ncomp, data: vec![Complex64::new(0.0, 0.0); ncomp * grid.nodes()] }
    }

    pub fn from_components(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        let ncomp = comps.len();
        if ncomp != 2 && ncomp != 4 {
            return Err(Error::arg("ncomp", format!("must be 2 or 4, got {ncomp}")));
        }
        let n = grid.nodes();
        let mut data = Vec::with_capacity(ncomp * n);
        for (c, comp) in comps.into_iter().enumerate() {
            if comp.len() != n {
                return Err(Error::arg(
                    "field",
                    format!("component {c} has {} values, grid has {n} nodes", comp.len()),
                ));
            }
            data.extend(comp);
        }
        let f = Self { grid, ncomp, data };
        f.check_finite()?;
        Ok(f)
    }

    /// Samples `f(x)` at every node, x = [x, y] (y = 0 in 1D).
    pub fn from_fn<const N: usize>(grid: Grid, f: impl Fn([f64; 2]) -> [Complex64; N]) -> Self {
        let mut out = Self::zeros(grid, N);
        let n = grid.nodes();
        for idx in 0..n {
            let v = f(grid.coords(idx));
            for (c, z) in v.into_iter().enumerate() {
                out.data[c * n + idx] = z;
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn nodes(&self) -> usize {
        self.grid.nodes()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.nodes();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.nodes();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Both components of a two-component field, mutably.
    pub fn pair_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert_eq!(self.ncomp, 2);
        let n = self.nodes();
        self.data.split_at_mut(n)
    }

    pub fn pair(&self) -> (&[Complex64], &[Complex64]) {
        let n = self.nodes();
        self.data.split_at(n)
    }

    /// Values of all components at a node, with periodic wrap.
    pub fn node(&self, j: isize) -> Vec<Complex64> {
        let n = self.nodes() as isize;
        let j = j.rem_euclid(n) as usize;
        (0..self.ncomp).map(|c| self.data[c * n as usize + j]).collect()
    }

    pub fn same_shape(&self, other: &SpinorField) -> bool {
        self.grid == other.grid && self.ncomp == other.ncomp
    }

    pub fn check_finite(&self) -> Result<()> {
        let n = self.nodes();
        match self.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            None => Ok(()),
            Some(i) => Err(Error::Data { what: "spinor field".into(), node: i % n }),
        }
    }

    /// max_j |Φ_j| (Euclidean norm over components).
    pub fn sup_norm(&self) -> f64 {
        let n = self.nodes();
        let mut best = 0.0f64;
        for j in 0..n {
            let mut s = 0.0;
            for c in 0..self.ncomp {
                s += self.data[c * n + j].norm_sqr();
            }
            if !s.is_finite() {
                return f64::INFINITY;
            }
            best = best.max(s);
        }
        best.sqrt()
    }

    /// Discrete l² norm sqrt(h Σ |Φ_j|²).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.weight() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn axpy(&mut self, a: Complex64, x: &SpinorField) {
        assert!(self.same_shape(x));
        for (y, &xv) in self.data.iter_mut().zip(&x.data) {
            *y += a * xv;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for y in &mut self.data {
            *y *= a;
        }
    }

    /// Node subsampling onto a coarser nested grid.
    pub fn restrict(&self, coarse: &Grid) -> Result<SpinorField> {
        let (sx, sy) = self.grid.restriction_stride(coarse)?;
        let mut out = SpinorField::zeros(*coarse, self.ncomp);
        let nf = self.nodes();
        let nc = coarse.nodes();
        match (self.grid, coarse) {
            (Grid::D1(_), Grid::D1(_)) => {
                for c in 0..self.ncomp {
                    for j in 0..nc {
                        out.data[c * nc + j] = self.data[c * nf + j * sx];
                    }
                }
            }
            (Grid::D2(f), Grid::D2(g)) => {
                let (myf, myc) = (f.y.m(), g.y.m());
                for c in 0..self.ncomp {
                    for j in 0..g.x.m() {
                        for k in 0..myc {
                            out.data[c * nc + j * myc + k] =
                                self.data[c * nf + (j * sx) * myf + k * sy];
                        }
                    }
                }
            }
            _ => unreachable!("dimension checked by restriction_stride"),
        }
        Ok(out)
    }

    pub(crate) fn from_raw(grid: Grid, ncomp: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), ncomp * grid.nodes());
        Self { grid, ncomp, data }
    }
}
