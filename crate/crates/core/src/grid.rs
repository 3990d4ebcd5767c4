//! Uniform periodic grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on (a, b) with M cells. Node M is identified with node 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    m: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::arg("domain", format!("need a < b, got ({a}, {b})")));
        }
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::arg("M", format!("must be even and >= 2, got {m}")));
        }
        Ok(Self { a, b, m })
    }

    /// Grid with mesh size h; (b - a)/h must be an even integer.
    pub fn with_h(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::arg("h", format!("must be positive, got {h}")));
        }
        let ratio = (b - a) / h;
        let m = ratio.round();
        if (ratio - m).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::arg("h", format!("(b - a)/h = {ratio} is not an integer")));
        }
        Self::new(a, b, m as usize)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.m as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.node(j)).collect()
    }

    /// Frequency μ_l = 2πl/(b - a) for l in -M/2..M/2.
    pub fn freq(&self, l: i64) -> f64 {
        2.0 * PI * l as f64 / self.len()
    }

    /// Frequencies in natural order l = -M/2, ..., M/2 - 1.
    pub fn freqs(&self) -> Vec<f64> {
        let half = (self.m / 2) as i64;
        (-half..half).map(|l| self.freq(l)).collect()
    }

    /// Periodic index wrap for stencil offsets.
    #[inline]
    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.m as isize) as usize
    }
}

/// Tensor-product periodic grid; node (j, k) is stored at j*M2 + k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    pub fn square(a: f64, b: f64, m: usize) -> Result<Self> {
        let g = Grid1D::new(a, b, m)?;
        Ok(Self { x: g, y: g })
    }

    pub fn nodes(&self) -> usize {
        self.x.m() * self.y.m()
    }

    pub fn cell_area(&self) -> f64 {
        self.x.h() * self.y.h()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Grid {
    D1(Grid1D),
    D2(Grid2D),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::D1(_) => 1,
            Grid::D2(_) => 2,
        }
    }

    pub fn nodes(&self) -> usize {
        match self {
            Grid::D1(g) => g.m(),
            Grid::D2(g) => g.nodes(),
        }
    }

    /// Quadrature weight h (1D) or h1*h2 (2D).
    pub fn weight(&self) -> f64 {
        match self {
            Grid::D1(g) => g.h(),
            Grid::D2(g) => g.cell_area(),
        }
    }

    /// Total domain measure.
    pub fn measure(&self) -> f64 {
        match self {
            Grid::D1(g) => g.len(),
            Grid::D2(g) => g.x.len() * g.y.len(),
        }
    }

    /// Coordinates of flat node index.
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        match self {
            Grid::D1(g) => [g.node(idx), 0.0],
            Grid::D2(g) => {
                let my = g.y.m();
                [g.x.node(idx / my), g.y.node(idx % my)]
            }
        }
    }

    pub fn as_1d(&self) -> Result<&Grid1D> {
        match self {
            Grid::D1(g) => Ok(g),
            Grid::D2(_) => Err(Error::arg("grid", "expected a 1D grid")),
        }
    }

    pub fn as_2d(&self) -> Result<&Grid2D> {
        match self {
            Grid::D2(g) => Ok(g),
            Grid::D1(_) => Err(Error::arg("grid", "expected a 2D grid")),
        }
    }

    /// Subsampling stride from `self` (fine) onto `coarse`, per axis.
    pub fn restriction_stride(&self, coarse: &Grid) -> Result<(usize, usize)> {
        fn axis(fine: &Grid1D, coarse: &Grid1D) -> Result<usize> {
            let same_domain = (fine.a() - coarse.a()).abs() <= 1e-12 * fine.len()
                && (fine.b() - coarse.b()).abs() <= 1e-12 * fine.len();
            if !same_domain || !fine.m().is_multiple_of(coarse.m()) {
                return Err(Error::arg(
                    "grid",
                    format!("incommensurable grids: M = {} onto M = {}", fine.m(), coarse.m()),
                ));
            }
            Ok(fine.m() / coarse.m())
        }
        match (self, coarse) {
            (Grid::D1(f), Grid::D1(c)) => Ok((axis(f, c)?, 1)),
            (Grid::D2(f), Grid::D2(c)) => Ok((axis(&f.x, &c.x)?, axis(&f.y, &c.y)?)),
            _ => Err(Error::arg("grid", "grids differ in dimension")),
        }
    }
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::D1(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::D2(g)
    }
}
