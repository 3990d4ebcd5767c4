//! Integrators for the dimensionless Dirac equation on periodic grids.
//!
//! The crate covers the two-component reduced model in 1D and 2D:
//!
//! ```text
//! i dΦ/dt = [-(i/ε) Σ σ_j ∂_j + σ_3/ε²] Φ + [V - Σ A_j σ_j] Φ
//! ```
//!
//! Six time integrators are provided. Four are finite-difference schemes
//! (leap-frog, two semi-implicit variants, Crank-Nicolson) in [`fdtd`].
//! The other two are Fourier pseudospectral schemes (exponential wave
//! integrator, Strang splitting) in [`expint`]. [`harness`] drives
//! convergence tables, stability scans and the 2D honeycomb run on top
//! of them.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod expint;
pub mod fdtd;
pub mod field;
pub mod grid;
pub mod harness;
pub mod observables;
pub mod ops;
pub mod par;
pub mod params;
pub mod potential;
pub mod scheme;
pub mod spectral;

pub use algebra::{dirac_alpha, dirac_beta, pauli, CMat, CMat2, CMat4};
pub use error::{Error, Result};
pub use field::SpinorField;
pub use grid::{Grid, Grid1D, Grid2D};
pub use params::SimParams;
pub use potential::{PotentialSet, ScalarField};
pub use scheme::{build_stepper, Scheme, Stepper};

pub use num_complex::Complex64;
