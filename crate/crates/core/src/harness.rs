//! Experiment driver: problem presets, reference solutions, error tables,
//! stability scans and the 2D honeycomb run.

use std::f64::consts::PI;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expint::TsfpState;
use crate::fdtd::{stability_bound, StabilityBound};
use crate::field::SpinorField;
use crate::grid::{Grid, Grid1D, Grid2D};
use crate::observables::{density_current, mass, ObservableReport};
use crate::ops::exact_free_solution;
use crate::par::{self, Exec};
use crate::params::SimParams;
use crate::potential::{catalog, sample_potential, PotentialSet, ScalarField};
use crate::scheme::{build_stepper_with, run_to_end, Scheme, Stepper, DEFAULT_BLOWUP_FACTOR};

type C = Complex64;

/// Named problem setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Ω = (-16, 16), V = (1-x)/(1+x²), A = (x+1)²/(1+x²), Gaussian pair, T = 2.
    #[serde(rename = "gaussian-1d")]
    Gaussian1d,
    /// Ω = (-1, 1), V = A = 0, plane wave e^{9πi(x+1)} in both components, T = 2.
    FreeDirac,
    /// Ω = [-10, 10]², honeycomb lattice V, A = 0, Gaussian pair.
    #[serde(rename = "honeycomb-2d")]
    Honeycomb2d,
    Custom,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-1d" => Ok(Preset::Gaussian1d),
            "free-dirac" => Ok(Preset::FreeDirac),
            "honeycomb-2d" => Ok(Preset::Honeycomb2d),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Gaussian1d => "gaussian-1d",
            Preset::FreeDirac => "free-dirac",
            Preset::Honeycomb2d => "honeycomb-2d",
            Preset::Custom => "custom",
        }
    }
}

/// Potentials selectable from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// V = (1-x)/(1+x²), A = (x+1)²/(1+x²).
    Gaussian,
    Free,
    Constant { v0: f64, a0: f64 },
    Honeycomb,
    /// Polynomial coefficients (lowest degree first) for V and A.
    Polynomial { v: Vec<f64>, #[serde(default)] a: Vec<f64> },
    /// V = amp cos(k·x + phase).
    Trigonometric { amp: f64, k: [f64; 2], #[serde(default)] phase: f64 },
}

impl PotentialSpec {
    pub fn build(&self, dim: usize) -> Result<PotentialSet> {
        let zeros = |d: usize| (0..d).map(|_| ScalarField::zero()).collect::<Vec<_>>();
        match self {
            PotentialSpec::Gaussian => {
                if dim != 1 {
                    return Err(Error::Config("gaussian potentials are one-dimensional".into()));
                }
                PotentialSet::new(catalog::gaussian_v(), vec![catalog::gaussian_a()])
            }
            PotentialSpec::Free => Ok(PotentialSet::free(dim)),
            PotentialSpec::Constant { v0, a0 } => {
                let mut a = vec![ScalarField::constant(*a0)];
                a.extend(zeros(dim - 1));
                PotentialSet::new(ScalarField::constant(*v0), a)
            }
            PotentialSpec::Honeycomb => PotentialSet::new(catalog::honeycomb_v(), zeros(dim)),
            PotentialSpec::Polynomial { v, a } => {
                let mut av = vec![if a.is_empty() { ScalarField::zero() } else { catalog::polynomial(a.clone()) }];
                av.extend(zeros(dim - 1));
                PotentialSet::new(catalog::polynomial(v.clone()), av)
            }
            PotentialSpec::Trigonometric { amp, k, phase } => {
                PotentialSet::new(catalog::trigonometric(*amp, *k, *phase), zeros(dim))
            }
        }
    }
}

/// Initial data selectable from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialSpec {
    /// φ_c = exp(-|x - center_c|²/2).
    GaussianPair { centers: [[f64; 2]; 2] },
    /// φ_1 = φ_2 = exp(iμ_l (x - a)) on the first axis.
    PlaneWave { mode: i64 },
    /// Kronecker delta at the central node in both components.
    Delta,
    Zero,
}

/// Fully specified problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub preset: Preset,
    pub dim: usize,
    pub domain: [f64; 2],
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
}

impl ProblemSpec {
    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Gaussian1d | Preset::Custom => Self {
                preset: p,
                dim: 1,
                domain: [-16.0, 16.0],
                potential: PotentialSpec::Gaussian,
                initial: InitialSpec::GaussianPair { centers: [[0.0, 0.0], [1.0, 0.0]] },
            },
            Preset::FreeDirac => Self {
                preset: p,
                dim: 1,
                domain: [-1.0, 1.0],
                potential: PotentialSpec::Free,
                initial: InitialSpec::PlaneWave { mode: 9 },
            },
            Preset::Honeycomb2d => Self {
                preset: p,
                dim: 2,
                domain: [-10.0, 10.0],
                potential: PotentialSpec::Honeycomb,
                initial: InitialSpec::GaussianPair { centers: [[0.0, 0.0], [1.0, 0.0]] },
            },
        }
    }

    /// Checks that a named preset has not been altered.
    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {}", self.dim)));
        }
        if !(self.domain[0] < self.domain[1]) {
            return Err(Error::Config("domain must satisfy a < b".into()));
        }
        if self.preset != Preset::Custom && *self != Self::preset(self.preset) {
            return Err(Error::Config(format!(
                "preset `{}` pins its domain, potentials and initial data; use `custom` to change them",
                self.preset.name()
            )));
        }
        Ok(())
    }

    pub fn grid(&self, h: f64) -> Result<Grid> {
        let g = Grid1D::with_h(self.domain[0], self.domain[1], h)?;
        Ok(if self.dim == 1 { Grid::D1(g) } else { Grid::D2(Grid2D::new(g, g)) })
    }

    pub fn potentials(&self) -> Result<PotentialSet> {
        self.potential.build(self.dim)
    }

    /// Initial field and, when available in closed form, its x-derivative.
    pub fn initial_field(&self, grid: &Grid) -> (SpinorField, Option<SpinorField>) {
        let a = self.domain[0];
        match &self.initial {
            InitialSpec::GaussianPair { centers } => {
                let cs = *centers;
                let g = move |x: [f64; 2], c: [f64; 2]| (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / 2.0).exp();
                let f = SpinorField::from_fn(*grid, |x| [C::new(g(x, cs[0]), 0.0), C::new(g(x, cs[1]), 0.0)]);
                let d = SpinorField::from_fn(*grid, |x| {
                    [C::new(-(x[0] - cs[0][0]) * g(x, cs[0]), 0.0), C::new(-(x[0] - cs[1][0]) * g(x, cs[1]), 0.0)]
                });
                (f, Some(d))
            }
            InitialSpec::PlaneWave { mode } => {
                let mu = 2.0 * PI * *mode as f64 / (self.domain[1] - self.domain[0]);
                let f = SpinorField::from_fn(*grid, |x| {
                    let z = C::from_polar(1.0, mu * (x[0] - a));
                    [z, z]
                });
                let d = SpinorField::from_fn(*grid, |x| {
                    let z = C::new(0.0, mu) * C::from_polar(1.0, mu * (x[0] - a));
                    [z, z]
                });
                (f, Some(d))
            }
            InitialSpec::Delta => {
                let mut f = SpinorField::zeros(*grid, 2);
                let center = match grid {
                    Grid::D1(g) => g.m() / 2,
                    Grid::D2(g) => (g.x.m() / 2) * g.y.m() + g.y.m() / 2,
                };
                f.component_mut(0)[center] = C::new(1.0, 0.0);
                f.component_mut(1)[center] = C::new(1.0, 0.0);
                (f, None)
            }
            InitialSpec::Zero => (SpinorField::zeros(*grid, 2), Some(SpinorField::zeros(*grid, 2))),
        }
    }

    pub fn params(&self, eps: f64, h: f64, tau: f64, t_final: f64) -> Result<SimParams> {
        let grid = self.grid(h)?;
        let (f, d) = self.initial_field(&grid);
        let p = SimParams::new(eps, tau, t_final, self.potentials()?, f)?;
        match d {
            Some(d) => p.with_derivative(d),
            None => Ok(p),
        }
    }

    /// (max |V|, max |A|) over the nodes of `grid` at t = 0.
    pub fn potential_bounds(&self, grid: &Grid) -> Result<(f64, f64)> {
        let s = sample_potential(&self.potentials()?, 0.0, grid)?;
        Ok((s.v_max(), s.a_max()))
    }
}

/// Step size entry: an explicit value or 0.9 × the stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    Value(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl TauSpec {
    pub const AUTO: TauSpec = TauSpec::Auto(AutoTag::Auto);
}

/// How the (h, τ) lists become cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CellRule {
    /// Every h with every τ.
    Product,
    /// h[k] with τ[k].
    Paired,
    /// Level k uses τ₀/r^k and h₀/r^k · δ_k(ε), with δ_k(ε) = ε² when
    /// ε ≥ ε₀/2^k and ε₀²/4^k otherwise (h₀ = h[0], τ₀ = τ[0]).
    Coupled { ratio: f64, levels: usize, eps0: f64 },
}

/// Mesh factor δ_k(ε) of the coupled rule.
pub fn coupled_delta(k: usize, eps: f64, eps0: f64) -> f64 {
    let p = 2f64.powi(k as i32);
    if eps >= eps0 / p {
        eps * eps
    } else {
        eps0 * eps0 / (p * p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Exact free flow (zero potentials only).
    Analytic,
    /// TSFP on a fine grid with a small step.
    TsfpFine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub kind: ReferenceKind,
    pub h_e: f64,
    pub tau_e: f64,
    /// Also solve at τ_e/2 and flag cells within 10× of the difference.
    #[serde(default)]
    pub self_check: bool,
}

impl ReferenceSpec {
    pub const TAU_E: f64 = 1e-5;

    pub fn tsfp(h_e: f64, tau_e: f64) -> Self {
        Self { kind: ReferenceKind::TsfpFine, h_e, tau_e, self_check: false }
    }

    pub fn analytic() -> Self {
        Self { kind: ReferenceKind::Analytic, h_e: 0.0, tau_e: 0.0, self_check: false }
    }

    /// Desk-scale defaults: h_e = 1/16 for pseudospectral schemes, 1/1024 when
    /// any finite-difference scheme is compared.
    pub fn default_for(schemes: &[Scheme]) -> Self {
        let h_e = if schemes.iter().any(|s| s.is_fdtd()) { 1.0 / 1024.0 } else { 1.0 / 16.0 };
        Self::tsfp(h_e, Self::TAU_E)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorNorm {
    L2,
    L1Density,
    L1Current,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub schemes: Vec<Scheme>,
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub tau: Vec<TauSpec>,
    pub t_final: f64,
    pub cells: CellRule,
    pub reference: ReferenceSpec,
    pub error_norm: ErrorNorm,
    pub blowup_factor: f64,
    pub exec: Exec,
}

impl ExperimentSpec {
    pub const DEFAULT_EPS: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];

    pub fn new(preset: Preset, schemes: Vec<Scheme>) -> Self {
        let reference = match preset {
            Preset::FreeDirac => ReferenceSpec::analytic(),
            _ => ReferenceSpec::default_for(&schemes),
        };
        let (h, tau, t_final) = match preset {
            Preset::Honeycomb2d => (vec![1.0 / 16.0], vec![TauSpec::Value(0.01)], 8.0),
            Preset::FreeDirac => (vec![1.0 / 256.0], vec![TauSpec::Value(1e-4)], 2.0),
            _ => (vec![1.0 / 16.0], vec![TauSpec::Value(0.01)], 2.0),
        };
        Self {
            problem: ProblemSpec::preset(preset),
            schemes,
            eps: Self::DEFAULT_EPS.to_vec(),
            h,
            tau,
            t_final,
            cells: CellRule::Product,
            reference,
            error_norm: ErrorNorm::L2,
            blowup_factor: DEFAULT_BLOWUP_FACTOR,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        if self.schemes.is_empty() || self.eps.is_empty() || self.h.is_empty() || self.tau.is_empty() {
            return Err(Error::Config("schemes, eps, h and tau lists must be non-empty".into()));
        }
        for &e in &self.eps {
            crate::params::validate_eps(e).map_err(|_| Error::Config(format!("eps = {e} outside (0, 1]")))?;
        }
        for t in &self.tau {
            if let TauSpec::Value(v) = t {
                if !(*v > 0.0) || *v > self.t_final {
                    return Err(Error::Config(format!("tau = {v} must lie in (0, T = {}]", self.t_final)));
                }
            }
        }
        for &h in &self.h {
            self.problem.grid(h).map_err(|e| Error::Config(format!("h = {h}: {e}")))?;
        }
        if self.problem.dim == 2 && self.schemes.iter().any(|s| s.is_fdtd()) {
            return Err(Error::Config("finite-difference schemes are one-dimensional".into()));
        }
        if self.reference.kind == ReferenceKind::Analytic && self.problem.potential != PotentialSpec::Free {
            return Err(Error::Config("analytic reference needs the free potential".into()));
        }
        if let CellRule::Paired = self.cells {
            if self.h.len() != self.tau.len() {
                return Err(Error::Config("paired cells need h and tau lists of equal length".into()));
            }
        }
        Ok(())
    }

    /// (scheme, ε, h, τ-spec) cells in output order.
    pub fn cells(&self) -> Vec<(Scheme, f64, f64, TauSpec)> {
        let mut out = vec![];
        for &s in &self.schemes {
            for &e in &self.eps {
                match self.cells {
                    CellRule::Product => {
                        for &h in &self.h {
                            for &t in &self.tau {
                                out.push((s, e, h, t));
                            }
                        }
                    }
                    CellRule::Paired => {
                        for (&h, &t) in self.h.iter().zip(&self.tau) {
                            out.push((s, e, h, t));
                        }
                    }
                    CellRule::Coupled { ratio, levels, eps0 } => {
                        let tau0 = match self.tau[0] {
                            TauSpec::Value(v) => v,
                            TauSpec::Auto(_) => f64::NAN,
                        };
                        for k in 0..levels {
                            let r = ratio.powi(k as i32);
                            out.push((s, e, self.h[0] / r * coupled_delta(k, e, eps0), TauSpec::Value(tau0 / r)));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    Unstable,
    ReferenceLimited,
}

impl CellStatus {
    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Unstable => "unstable",
            CellStatus::ReferenceLimited => "reference-limited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub scheme: Scheme,
    pub eps: f64,
    pub h: f64,
    pub tau: f64,
    pub error: Option<f64>,
    pub order: Option<f64>,
    pub status: CellStatus,
    pub wall_time: f64,
}

/// Discrete l² distance sqrt(h Σ |Φ_j - ref_j|²), the reference subsampled
/// onto the numeric grid.
pub fn error_norm(numeric: &SpinorField, reference: &SpinorField) -> Result<f64> {
    let r = restrict_like(numeric, reference)?;
    let w = numeric.grid().weight();
    Ok((w * numeric.data().iter().zip(r.data()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()).sqrt())
}

fn restrict_like(numeric: &SpinorField, reference: &SpinorField) -> Result<SpinorField> {
    if numeric.ncomp() != reference.ncomp() {
        return Err(Error::arg("reference", "component counts differ"));
    }
    if numeric.grid() == reference.grid() {
        return Ok(reference.clone());
    }
    reference.restrict(numeric.grid())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservableKind {
    Density,
    Current,
}

/// h Σ |q_j - q_ref,j| for the total density or the current (summed over
/// current components).
pub fn observable_error_l1(numeric: &SpinorField, reference: &SpinorField, eps: f64, kind: ObservableKind) -> Result<f64> {
    let r = restrict_like(numeric, reference)?;
    let a = density_current(numeric, eps)?;
    let b = density_current(&r, eps)?;
    let w = numeric.grid().weight();
    let l1 = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>();
    Ok(w * match kind {
        ObservableKind::Density => l1(&a.rho, &b.rho),
        ObservableKind::Current => a.current.iter().zip(&b.current).map(|(x, y)| l1(x, y)).sum(),
    })
}

/// log(e_prev/e)/log(ratio).
pub fn observed_order(e_prev: f64, e: f64, ratio: f64) -> f64 {
    (e_prev / e).ln() / ratio.ln()
}

/// Fills `order` in place. Rows are consecutive records sharing scheme and ε
/// (and h, when both lists vary in a product sweep); the refinement ratio is
/// taken from τ when it changes, else from h.
pub fn assign_orders(records: &mut [ConvergenceRecord], group_by_h: bool) {
    for i in 0..records.len() {
        records[i].order = None;
        if i == 0 {
            continue;
        }
        let (p, c) = (&records[i - 1], &records[i]);
        let same_row = p.scheme == c.scheme && p.eps == c.eps && (!group_by_h || p.h == c.h);
        if !same_row {
            continue;
        }
        if let (Some(ep), Some(ec)) = (p.error, c.error) {
            if p.status == CellStatus::Unstable || c.status == CellStatus::Unstable || ec <= 0.0 || ep <= 0.0 {
                continue;
            }
            let ratio = if p.tau != c.tau { p.tau / c.tau } else { p.h / c.h };
            if ratio != 1.0 {
                records[i].order = Some(observed_order(ep, ec, ratio));
            }
        }
    }
}

/// Reference solution at the final time for one ε.
#[derive(Debug, Clone)]
pub struct Reference {
    pub eps: f64,
    pub field: SpinorField,
    /// ‖ref(τ_e) - ref(τ_e/2)‖ when the self-check ran.
    pub estimate: Option<f64>,
}

fn finest_h(hs: impl Iterator<Item = f64>) -> f64 {
    hs.fold(f64::INFINITY, f64::min)
}

pub fn compute_reference(spec: &ExperimentSpec, eps: f64, cell_hs: &[f64]) -> Result<Reference> {
    let problem = &spec.problem;
    // the analytic reference is evaluated on the finest cell grid; h_e is unused
    let h_e = match spec.reference.kind {
        ReferenceKind::Analytic => None,
        ReferenceKind::TsfpFine => Some(spec.reference.h_e),
    };
    let h_ref = finest_h(cell_hs.iter().copied().chain(h_e));
    let grid = problem.grid(h_ref)?;
    match spec.reference.kind {
        ReferenceKind::Analytic => {
            let (f, _) = problem.initial_field(&grid);
            Ok(Reference { eps, field: exact_free_solution(&f, eps, spec.t_final)?, estimate: None })
        }
        ReferenceKind::TsfpFine => {
            let tau = SimParams::fit_tau(spec.t_final, spec.reference.tau_e);
            let run = |tau: f64| -> Result<SpinorField> {
                let p = problem.params(eps, h_ref, tau, spec.t_final)?;
                let mut s = TsfpState::new(p)?.with_exec(spec.exec);
                run_to_end(&mut s, spec.blowup_factor, |_| Ok(()))?;
                Ok(s.current().clone())
            };
            let field = run(tau)?;
            let estimate = if spec.reference.self_check {
                Some(error_norm(&field, &run(tau / 2.0)?)?)
            } else {
                None
            };
            Ok(Reference { eps, field, estimate })
        }
    }
}

/// Concrete step size for one cell; `auto` becomes 0.9 × the stability bound.
pub fn resolve_tau(spec: &ExperimentSpec, scheme: Scheme, eps: f64, h: f64, t: TauSpec) -> Result<f64> {
    match t {
        TauSpec::Value(v) => Ok(v),
        TauSpec::Auto(_) => {
            let grid = spec.problem.grid(h)?;
            let (vmax, amax) = spec.problem.potential_bounds(&grid)?;
            match stability_bound(scheme, eps, h, vmax, amax)? {
                StabilityBound::Limited(b) => Ok(SimParams::fit_tau(spec.t_final, 0.9 * b)),
                StabilityBound::Unconditional => Err(Error::Config(format!(
                    "`tau = auto` needs a stability bound; {scheme} has none, give tau explicitly"
                ))),
            }
        }
    }
}

fn run_cell(spec: &ExperimentSpec, scheme: Scheme, eps: f64, h: f64, tau: f64, reference: &Reference) -> Result<ConvergenceRecord> {
    let start = Instant::now();
    let params = spec.problem.params(eps, h, tau, spec.t_final)?;
    let mut stepper = build_stepper_with(scheme, params, Exec::Sequential)?;
    let outcome = run_to_end(stepper.as_mut(), spec.blowup_factor, |_| Ok(()));
    let (error, mut status) = match outcome {
        Ok(()) => {
            let num = stepper.current();
            let e = match spec.error_norm {
                ErrorNorm::L2 => error_norm(num, &reference.field)?,
                ErrorNorm::L1Density => observable_error_l1(num, &reference.field, eps, ObservableKind::Density)?,
                ErrorNorm::L1Current => observable_error_l1(num, &reference.field, eps, ObservableKind::Current)?,
            };
            (Some(e), CellStatus::Ok)
        }
        Err(Error::BlowUp { .. }) => (None, CellStatus::Unstable),
        Err(e) => return Err(e),
    };
    if let (Some(e), Some(est)) = (error, reference.estimate) {
        if e < 10.0 * est {
            status = CellStatus::ReferenceLimited;
        }
    }
    Ok(ConvergenceRecord { scheme, eps, h, tau, error, order: None, status, wall_time: start.elapsed().as_secs_f64() })
}

/// Result of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub records: Vec<ConvergenceRecord>,
    /// (ε, reference self-check estimate) per ε.
    pub reference_estimates: Vec<(f64, Option<f64>)>,
}

fn resolved_cells(spec: &ExperimentSpec) -> Result<Vec<(Scheme, f64, f64, f64)>> {
    spec.cells()
        .into_iter()
        .map(|(s, e, h, t)| Ok((s, e, h, resolve_tau(spec, s, e, h, t)?)))
        .collect()
}

/// One reference per distinct ε of the sweep, on the finest grid it needs.
pub fn compute_references(spec: &ExperimentSpec) -> Result<Vec<Reference>> {
    spec.validate()?;
    let resolved = resolved_cells(spec)?;
    let mut eps_list: Vec<f64> = vec![];
    for &(_, e, _, _) in &resolved {
        if !eps_list.contains(&e) {
            eps_list.push(e);
        }
    }
    par::map_jobs(spec.exec, &eps_list, |&e| {
        let hs: Vec<f64> = resolved.iter().filter(|c| c.1 == e).map(|c| c.2).collect();
        compute_reference(spec, e, &hs)
    })
    .into_iter()
    .collect()
}

/// Runs every cell of `spec`, one reference per ε, cells on the worker pool.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<ConvergenceTable> {
    let refs = compute_references(spec)?;
    run_convergence_with(spec, &refs)
}

/// As [`run_convergence`] with precomputed references (one per ε, on grids
/// the cell grids nest into).
pub fn run_convergence_with(spec: &ExperimentSpec, refs: &[Reference]) -> Result<ConvergenceTable> {
    spec.validate()?;
    let resolved = resolved_cells(spec)?;
    for &(_, e, _, _) in &resolved {
        if !refs.iter().any(|r| r.eps == e) {
            return Err(Error::Config(format!("no reference for eps = {e}")));
        }
    }
    let mut records = par::map_jobs(spec.exec, &resolved, |&(s, e, h, t)| {
        let r = refs.iter().find(|r| r.eps == e).expect("checked above");
        run_cell(spec, s, e, h, t, r)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let group_by_h = matches!(spec.cells, CellRule::Product) && spec.h.len() > 1 && spec.tau.len() > 1;
    assign_orders(&mut records, group_by_h);
    Ok(ConvergenceTable { records, reference_estimates: refs.iter().map(|r| (r.eps, r.estimate)).collect() })
}

/// Full-precision scientific formatting (17 significant digits).
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "scheme,eps,h,tau,error,order,status,wall_time";

impl ConvergenceTable {
    /// CSV text; `timing = false` blanks the wall-time column so output is
    /// reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.scheme,
                fmt_num(r.eps),
                fmt_num(r.h),
                fmt_num(r.tau),
                opt(r.error),
                opt(r.order),
                r.status.name(),
                if timing { fmt_num(r.wall_time) } else { String::new() }
            ));
        }
        s
    }
}

/// Stable or blown up within the final time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// Constant-potential setup for stability scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySetup {
    pub v0: f64,
    pub a0: f64,
    pub domain: [f64; 2],
    pub t_final: f64,
    pub initial: InitialSpec,
    pub blowup_factor: f64,
}

impl Default for StabilitySetup {
    fn default() -> Self {
        Self {
            v0: 1.0,
            a0: 1.0,
            domain: [-16.0, 16.0],
            t_final: 2.0,
            initial: InitialSpec::Delta,
            blowup_factor: DEFAULT_BLOWUP_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub factor: f64,
    pub tau: f64,
    pub steps: usize,
    pub status: Stability,
}

/// Runs `scheme` at τ = f × bound for every factor. Schemes without a bound
/// are scaled by the leap-frog bound of the same setting.
pub fn stability_scan(scheme: Scheme, eps: f64, h: f64, factors: &[f64]) -> Result<Vec<StabilityPoint>> {
    stability_scan_with(&StabilitySetup::default(), scheme, eps, h, factors, Exec::default())
}

pub fn stability_scan_with(
    setup: &StabilitySetup,
    scheme: Scheme,
    eps: f64,
    h: f64,
    factors: &[f64],
    exec: Exec,
) -> Result<Vec<StabilityPoint>> {
    let problem = ProblemSpec {
        preset: Preset::Custom,
        dim: 1,
        domain: setup.domain,
        potential: PotentialSpec::Constant { v0: setup.v0, a0: setup.a0 },
        initial: setup.initial.clone(),
    };
    let base = match stability_bound(scheme, eps, h, setup.v0, setup.a0)? {
        StabilityBound::Limited(b) => b,
        StabilityBound::Unconditional => stability_bound(Scheme::Lffd, eps, h, setup.v0, setup.a0)?
            .value()
            .expect("leap-frog bound is finite"),
    };
    par::map_jobs(exec, factors, |&f| {
        let tau = SimParams::fit_tau(setup.t_final, f * base);
        let params = problem.params(eps, h, tau, setup.t_final)?;
        let steps = params.steps();
        let mut s = build_stepper_with(scheme, params, Exec::Sequential)?;
        let status = match run_to_end(s.as_mut(), setup.blowup_factor, |_| Ok(())) {
            Ok(()) => Stability::Stable,
            Err(Error::BlowUp { .. }) => Stability::Unstable,
            Err(e) => return Err(e),
        };
        Ok(StabilityPoint { factor: f, tau, steps, status })
    })
    .into_iter()
    .collect()
}

/// Density fields ρ_1, ρ_2 at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySnapshot {
    pub t: f64,
    pub dims: [usize; 2],
    pub rho: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoneycombRun {
    pub eps: f64,
    pub reports: Vec<ObservableReport>,
    pub snapshots: Vec<DensitySnapshot>,
    /// max_n |mass_n - mass_0| / mass_0.
    pub mass_drift: f64,
}

/// Node cap for 2D runs.
pub const DEFAULT_NODE_CAP: usize = 1 << 22;

/// TSFP on the honeycomb preset; snapshots at the requested times (rounded to steps).
pub fn run_honeycomb_2d(grid: Grid2D, eps: f64, tau: f64, t_final: f64, snapshot_times: &[f64]) -> Result<HoneycombRun> {
    run_honeycomb_2d_capped(grid, eps, tau, t_final, snapshot_times, DEFAULT_NODE_CAP, Exec::default())
}

pub fn run_honeycomb_2d_capped(
    grid: Grid2D,
    eps: f64,
    tau: f64,
    t_final: f64,
    snapshot_times: &[f64],
    node_cap: usize,
    exec: Exec,
) -> Result<HoneycombRun> {
    if grid.nodes() > node_cap {
        return Err(Error::Config(format!("grid has {} nodes, cap is {node_cap}", grid.nodes())));
    }
    let problem = ProblemSpec::preset(Preset::Honeycomb2d);
    let g = Grid::D2(grid);
    let (f, _) = problem.initial_field(&g);
    let potentials = problem.potentials()?;
    let params = SimParams::new(eps, tau, t_final, potentials.clone(), f)?;
    let steps = params.steps();
    let mut want: Vec<usize> = snapshot_times.iter().map(|t| (t / tau).round() as usize).filter(|&n| n <= steps).collect();
    want.sort_unstable();
    want.dedup();
    let mut s = TsfpState::new(params)?.with_exec(exec);
    let m0 = mass(s.current());
    let mut drift: f64 = 0.0;
    let mut reports = vec![];
    let mut snapshots = vec![];
    let dims = [grid.x.m(), grid.y.m()];
    run_to_end(&mut s, DEFAULT_BLOWUP_FACTOR, |st| {
        let field = st.current();
        let m = mass(field);
        drift = drift.max(((m - m0) / m0).abs());
        if want.binary_search(&st.steps_taken()).is_ok() {
            let rep = ObservableReport::new(field, st.time(), eps, Some(&potentials))?;
            snapshots.push(DensitySnapshot { t: st.time(), dims, rho: rep.density.clone() });
            reports.push(rep);
        }
        Ok(())
    })?;
    Ok(HoneycombRun { eps, reports, snapshots, mass_drift: drift })
}

/// Writes `data` as little-endian f64 to `<dir>/<name>.bin` with a JSON sidecar.
pub fn write_snapshot(dir: &Path, name: &str, data: &[f64], meta: serde_json::Value) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut bytes = Vec::with_capacity(8 * data.len());
    for x in data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(dir.join(format!("{name}.bin")), bytes)?;
    let mut f = fs::File::create(dir.join(format!("{name}.json")))?;
    f.write_all(serde_json::to_string_pretty(&meta)?.as_bytes())?;
    Ok(())
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot(dir: &Path, name: &str) -> Result<(Vec<f64>, serde_json::Value)> {
    let bytes = fs::read(dir.join(format!("{name}.bin")))?;
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let meta = serde_json::from_slice(&fs::read(dir.join(format!("{name}.json")))?)?;
    Ok((data, meta))
}

/// Stepper-level helper: field at the final time plus the mass series.
pub fn trajectory_masses(stepper: &mut dyn Stepper, blowup_factor: f64) -> Result<Vec<f64>> {
    let mut out = vec![];
    run_to_end(stepper, blowup_factor, |s| {
        out.push(mass(s.current()));
        Ok(())
    })?;
    Ok(out)
}
