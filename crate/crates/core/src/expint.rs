//! Fourier pseudospectral integrators: the exponential wave integrator
//! (EWI-FP) and Strang time splitting (TSFP), in 1D and 2D.

use num_complex::Complex64;

use crate::algebra::{c, CMat2};
use crate::error::{Error, Result};
use crate::field::SpinorField;
use crate::ops::{ewi_filters, mode_flow, mode_operator_for, phase_decomp};
use crate::par::{self, Exec};
use crate::params::SimParams;
use crate::potential::{sample_potential, PotentialSample, PotentialSet};
use crate::scheme::{Scheme, Stepper};
use crate::spectral::{ModeCoeffs, SpectralPlan};

type C = Complex64;

pub use crate::potential::simpson;

/// (∫V dt, ∫A_k dt) over [t_n, t_n + tau] at a point.
pub fn potential_integrals(p: &PotentialSet, t_n: f64, tau: f64, x: [f64; 2]) -> (f64, [f64; 3]) {
    p.integrals(t_n, tau, x)
}

fn check_two_component(params: &SimParams) -> Result<()> {
    if params.initial.ncomp() != 2 {
        return Err(Error::arg("initial", "pseudospectral integrators evolve two-component fields"));
    }
    if params.potentials.a.len() > params.grid.dim() {
        return Err(Error::arg(
            "A",
            format!("{} magnetic components on a {}D grid", params.potentials.a.len(), params.grid.dim()),
        ));
    }
    Ok(())
}

/// Applies a per-index 2x2 matrix to a two-component coefficient array.
fn apply_mats(exec: Exec, mats: &[CMat2], u: &mut [C], w: &mut [C]) {
    par::zip2(exec, u, w, |i, x, y| {
        let m = &mats[i];
        let (a, b) = (*x, *y);
        *x = m[(0, 0)] * a + m[(0, 1)] * b;
        *y = m[(1, 0)] * a + m[(1, 1)] * b;
    });
}

/// G(t)Φ with G = V - Σ_k A_k σ_k, nodewise.
fn apply_g(exec: Exec, pot: &PotentialSample, field: &SpinorField) -> SpinorField {
    let mut out = field.clone();
    let (u, w) = out.pair_mut();
    par::zip2(exec, u, w, |j, x, y| {
        let (a1, a2, a3) = (pot.a(0, j), pot.a(1, j), pot.a(2, j));
        let v = pot.v[j];
        let (p, q) = (*x, *y);
        *x = (v - a3) * p - c(a1, -a2) * q;
        *y = (v + a3) * q - c(a1, a2) * p;
    });
    out
}

/// Exponential wave integrator state.
///
/// Each mode is advanced by the exact linear flow plus a Gautschi-type
/// quadrature of the Duhamel integral, with the potential term G(t)Φ
/// frozen at t_n and corrected by its backward difference.
#[derive(Debug, Clone)]
pub struct EwiState {
    plan: SpectralPlan,
    flow: Vec<CMat2>,
    q1: Vec<CMat2>,
    q2: Vec<CMat2>,
    current: SpinorField,
    current_modes: ModeCoeffs,
    prev_gphi_modes: Option<ModeCoeffs>,
    frozen: Option<PotentialSample>,
    n: usize,
    t: f64,
    params: SimParams,
    exec: Exec,
}

impl EwiState {
    pub fn new(params: SimParams) -> Result<Self> {
        params.validate()?;
        check_two_component(&params)?;
        let plan = SpectralPlan::new(params.grid);
        let (eps, tau) = (params.eps, params.tau);
        let n = params.grid.nodes();
        let mut flow = Vec::with_capacity(n);
        let mut q1 = Vec::with_capacity(n);
        let mut q2 = Vec::with_capacity(n);
        for i in 0..n {
            let op = mode_operator_for(&plan, eps, i)?;
            flow.push(mode_flow(&op, tau));
            let (a, b) = ewi_filters(&op, tau);
            q1.push(a);
            q2.push(b);
        }
        let frozen = if params.potentials.is_time_independent() {
            Some(sample_potential(&params.potentials, 0.0, &params.grid)?)
        } else {
            None
        };
        let current_modes = plan.analyze(&params.initial);
        Ok(Self {
            plan,
            flow,
            q1,
            q2,
            current: params.initial.clone(),
            current_modes,
            prev_gphi_modes: None,
            frozen,
            n: 0,
            t: 0.0,
            params,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self.plan = self.plan.with_exec(exec);
        self
    }

    pub fn current_modes(&self) -> &ModeCoeffs {
        &self.current_modes
    }

    /// Largest ‖Q1‖₂/τ and ‖Q2‖₂/τ² over all modes.
    pub fn filter_ratios(&self) -> (f64, f64) {
        let tau = self.params.tau;
        let r1 = self.q1.iter().map(|m| crate::algebra::norm2(m) / tau).fold(0.0, f64::max);
        let r2 = self.q2.iter().map(|m| crate::algebra::norm2(m) / (tau * tau)).fold(0.0, f64::max);
        (r1, r2)
    }
}

impl Stepper for EwiState {
    fn scheme(&self) -> Scheme {
        Scheme::EwiFp
    }

    fn step(&mut self) -> Result<()> {
        let pot = match &self.frozen {
            Some(p) => p.clone(),
            None => sample_potential(&self.params.potentials, self.t, &self.params.grid)?,
        };
        let gphi = self.plan.analyze(&apply_g(self.exec, &pot, &self.current));
        let inv_tau = 1.0 / self.params.tau;
        let (gu, gw) = gphi.pair();
        let prev = self.prev_gphi_modes.as_ref().map(|p| p.pair());
        let (flow, q1, q2) = (&self.flow, &self.q1, &self.q2);
        let (u, w) = self.current_modes.pair_mut();
        let mi = c(0.0, -1.0);
        par::zip2(self.exec, u, w, |l, x, y| {
            let e = &flow[l];
            let (a, b) = (*x, *y);
            let (f0, f1) = (gu[l], gw[l]);
            let mut nx = e[(0, 0)] * a + e[(0, 1)] * b + mi * (q1[l][(0, 0)] * f0 + q1[l][(0, 1)] * f1);
            let mut ny = e[(1, 0)] * a + e[(1, 1)] * b + mi * (q1[l][(1, 0)] * f0 + q1[l][(1, 1)] * f1);
            if let Some((pu, pw)) = prev {
                let (d0, d1) = ((f0 - pu[l]) * inv_tau, (f1 - pw[l]) * inv_tau);
                nx += mi * (q2[l][(0, 0)] * d0 + q2[l][(0, 1)] * d1);
                ny += mi * (q2[l][(1, 0)] * d0 + q2[l][(1, 1)] * d1);
            }
            *x = nx;
            *y = ny;
        });
        self.plan.synthesize_into(&self.current_modes, &mut self.current);
        self.prev_gphi_modes = Some(gphi);
        self.n += 1;
        self.t += self.params.tau;
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

/// Strang splitting state: half free flight, nodal potential phase, half free flight.
#[derive(Debug, Clone)]
pub struct TsfpState {
    plan: SpectralPlan,
    half_flow: Vec<CMat2>,
    phase: Option<Vec<CMat2>>,
    current: SpinorField,
    modes: ModeCoeffs,
    n: usize,
    t: f64,
    tau: f64,
    params: SimParams,
    exec: Exec,
}

impl TsfpState {
    pub fn new(params: SimParams) -> Result<Self> {
        params.validate()?;
        check_two_component(&params)?;
        let plan = SpectralPlan::new(params.grid);
        let modes = ModeCoeffs::zeros(params.grid, 2);
        let mut s = Self {
            plan,
            half_flow: vec![],
            phase: None,
            current: params.initial.clone(),
            modes,
            n: 0,
            t: 0.0,
            tau: params.tau,
            params,
            exec: Exec::default(),
        };
        s.rebuild()?;
        Ok(s)
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self.plan = self.plan.with_exec(exec);
        self
    }

    fn rebuild(&mut self) -> Result<()> {
        let eps = self.params.eps;
        let n = self.params.grid.nodes();
        self.half_flow = (0..n)
            .map(|i| Ok(mode_flow(&mode_operator_for(&self.plan, eps, i)?, 0.5 * self.tau)))
            .collect::<Result<_>>()?;
        self.phase = if self.params.potentials.is_time_independent() {
            Some(self.phase_matrices(0.0)?)
        } else {
            None
        };
        Ok(())
    }

    /// P e^{-iΛ} P* for every node over [t, t + τ].
    fn phase_matrices(&self, t: f64) -> Result<Vec<CMat2>> {
        let grid = self.params.grid;
        let d = self.params.potentials.a.len();
        let pot = &self.params.potentials;
        let tau = self.tau;
        let out = par::map_range(self.exec, grid.nodes(), |j| {
            let x = grid.coords(j);
            let (v1, a1) = pot.integrals(t, tau, x);
            phase_decomp(v1, &a1[..d]).map(|pd| pd.exp_neg_i())
        });
        out.into_iter()
            .enumerate()
            .map(|(j, r)| {
                let m = r?;
                if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    Ok(m)
                } else {
                    Err(Error::Data { what: "potential integral".into(), node: j })
                }
            })
            .collect()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Flips the direction of time (τ → -τ).
    pub fn reverse(&mut self) -> Result<()> {
        self.tau = -self.tau;
        self.rebuild()
    }

    fn half_flight(&mut self) {
        self.plan.analyze_into(&self.current, &mut self.modes);
        let (u, w) = self.modes.pair_mut();
        apply_mats(self.exec, &self.half_flow, u, w);
        self.plan.synthesize_into(&self.modes, &mut self.current);
    }
}

impl Stepper for TsfpState {
    fn scheme(&self) -> Scheme {
        Scheme::Tsfp
    }

    fn step(&mut self) -> Result<()> {
        #[cfg(debug_assertions)]
        let mass0 = self.current.l2_norm();
        self.half_flight();
        let fresh;
        let phase = match &self.phase {
            Some(p) => p,
            None => {
                fresh = self.phase_matrices(self.t)?;
                &fresh
            }
        };
        let (u, w) = self.current.pair_mut();
        apply_mats(self.exec, phase, u, w);
        self.half_flight();
        #[cfg(debug_assertions)]
        {
            let mass1 = self.current.l2_norm();
            debug_assert!(
                (mass1 - mass0).abs() <= 1e-10 * mass0.max(1e-300) || !mass1.is_finite(),
                "TSFP step changed the mass: {mass0} -> {mass1}"
            );
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
