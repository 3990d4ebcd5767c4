//! Electric and magnetic potentials as evaluable scalar fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;

pub type ScalarFn = Arc<dyn Fn(f64, [f64; 2]) -> f64 + Send + Sync>;

/// A real scalar field f(t, x), optionally with a time antiderivative F
/// such that ∫_{t0}^{t1} f dt = F(t1, x) - F(t0, x).
#[derive(Clone)]
pub struct ScalarField {
    f: ScalarFn,
    antiderivative: Option<ScalarFn>,
    time_independent: bool,
    known_zero: bool,
    label: String,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("time_independent", &self.time_independent)
            .field("antiderivative", &self.antiderivative.is_some())
            .finish()
    }
}

impl ScalarField {
    /// Time-independent field f(x).
    pub fn stationary(label: impl Into<String>, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |_, x| f(x)),
            antiderivative: None,
            time_independent: true,
            known_zero: false,
            label: label.into(),
        }
    }

    /// Time-dependent field f(t, x).
    pub fn dynamic(label: impl Into<String>, f: impl Fn(f64, [f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), antiderivative: None, time_independent: false, known_zero: false, label: label.into() }
    }

    /// Registers a closed-form time antiderivative.
    pub fn with_antiderivative(mut self, big_f: impl Fn(f64, [f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(big_f));
        self
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        let mut s = Self::stationary(format!("constant({value})"), move |_| value);
        s.known_zero = value == 0.0;
        s
    }

    /// True only for fields constructed as the constant 0.
    pub fn is_known_zero(&self) -> bool {
        self.known_zero
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    #[inline]
    pub fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        (self.f)(t, x)
    }

    /// ∫_{t0}^{t0+tau} f(t, x) dt: exact when stationary or an antiderivative
    /// is registered, Simpson's rule otherwise.
    pub fn integrate(&self, t0: f64, tau: f64, x: [f64; 2]) -> f64 {
        if self.time_independent {
            return self.eval(t0, x) * tau;
        }
        if let Some(big_f) = &self.antiderivative {
            return big_f(t0 + tau, x) - big_f(t0, x);
        }
        simpson(|t| self.eval(t, x), t0, tau)
    }
}

/// (tau/6)[f(t0) + 4 f(t0 + tau/2) + f(t0 + tau)].
pub fn simpson(f: impl Fn(f64) -> f64, t0: f64, tau: f64) -> f64 {
    tau / 6.0 * (f(t0) + 4.0 * f(t0 + 0.5 * tau) + f(t0 + tau))
}

/// V and the magnetic components A_1..A_d.
#[derive(Debug, Clone)]
pub struct PotentialSet {
    pub v: ScalarField,
    pub a: Vec<ScalarField>,
}

/// Per-node samples of a potential set at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSample {
    pub v: Vec<f64>,
    pub a: Vec<Vec<f64>>,
}

impl PotentialSample {
    /// A_k at node j, or 0 when the component is absent.
    #[inline]
    pub fn a(&self, k: usize, j: usize) -> f64 {
        self.a.get(k).map_or(0.0, |ak| ak[j])
    }

    pub fn v_max(&self) -> f64 {
        self.v.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max over nodes of |A(x)|.
    pub fn a_max(&self) -> f64 {
        (0..self.v.len())
            .map(|j| (0..self.a.len()).map(|k| self.a[k][j].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

impl PotentialSet {
    pub fn new(v: ScalarField, a: Vec<ScalarField>) -> Result<Self> {
        if a.len() > 3 {
            return Err(Error::arg("A", format!("at most 3 magnetic components, got {}", a.len())));
        }
        Ok(Self { v, a })
    }

    /// V ≡ 0, A ≡ 0 with `d` magnetic components.
    pub fn free(d: usize) -> Self {
        Self { v: ScalarField::zero(), a: (0..d).map(|_| ScalarField::zero()).collect() }
    }

    /// Constant V⁰ and A⁰ (1D).
    pub fn constant(v0: f64, a0: f64) -> Self {
        Self { v: ScalarField::constant(v0), a: vec![ScalarField::constant(a0)] }
    }

    pub fn is_time_independent(&self) -> bool {
        self.v.is_time_independent() && self.a.iter().all(ScalarField::is_time_independent)
    }

    pub fn is_magnetic_free(&self) -> bool {
        self.a.iter().all(ScalarField::is_known_zero)
    }

    /// Same potentials with time frozen at `t0`.
    pub fn frozen_at(&self, t0: f64) -> Self {
        let freeze = |s: &ScalarField| {
            if s.is_time_independent() {
                return s.clone();
            }
            let f = s.f.clone();
            ScalarField::stationary(format!("{}@{t0}", s.label), move |x| f(t0, x))
        };
        Self { v: freeze(&self.v), a: self.a.iter().map(freeze).collect() }
    }

    /// Adds a constant to V.
    pub fn shifted(&self, v0: f64) -> Self {
        let f = self.v.f.clone();
        let v = ScalarField {
            f: Arc::new(move |t, x| f(t, x) + v0),
            antiderivative: self.v.antiderivative.clone().map(|big_f| -> ScalarFn {
                Arc::new(move |t, x| big_f(t, x) + v0 * t)
            }),
            time_independent: self.v.time_independent,
            known_zero: false,
            label: format!("{}+{v0}", self.v.label),
        };
        Self { v, a: self.a.clone() }
    }

    /// Integrals of V and A_k over [t0, t0 + tau] at a point.
    pub fn integrals(&self, t0: f64, tau: f64, x: [f64; 2]) -> (f64, [f64; 3]) {
        let mut a1 = [0.0; 3];
        for (k, ak) in self.a.iter().enumerate() {
            a1[k] = ak.integrate(t0, tau, x);
        }
        (self.v.integrate(t0, tau, x), a1)
    }
}

/// Samples V and every A_k at interior nodes at time t.
pub fn sample_potential(p: &PotentialSet, t: f64, grid: &Grid) -> Result<PotentialSample> {
    if !(t >= 0.0) && !(t < 0.0) {
        return Err(Error::arg("t", "time must be finite"));
    }
    let n = grid.nodes();
    let sample = |s: &ScalarField, what: &str| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let v = s.eval(t, grid.coords(j));
            if !v.is_finite() {
                return Err(Error::Data { what: format!("potential {what}"), node: j });
            }
            out.push(v);
        }
        Ok(out)
    };
    let v = sample(&p.v, "V")?;
    let a = p
        .a
        .iter()
        .enumerate()
        .map(|(k, ak)| sample(ak, &format!("A{}", k + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PotentialSample { v, a })
}

/// Named potentials available to presets and configuration files.
pub mod catalog {
    use super::*;

    /// V(x) = (1 - x)/(1 + x²).
    pub fn gaussian_v() -> ScalarField {
        ScalarField::stationary("(1-x)/(1+x^2)", |x| (1.0 - x[0]) / (1.0 + x[0] * x[0]))
    }

    /// A(x) = (x + 1)²/(1 + x²).
    pub fn gaussian_a() -> ScalarField {
        ScalarField::stationary("(x+1)^2/(1+x^2)", |x| (x[0] + 1.0).powi(2) / (1.0 + x[0] * x[0]))
    }

    /// Σ_k cos((4π/√3) e_k·x) over the three honeycomb lattice directions.
    pub fn honeycomb_v() -> ScalarField {
        let s3 = 3f64.sqrt();
        let k = 4.0 * std::f64::consts::PI / s3;
        let e = [[-1.0, 0.0], [0.5, s3 / 2.0], [0.5, -s3 / 2.0]];
        ScalarField::stationary("honeycomb", move |x| {
            e.iter().map(|ek| (k * (ek[0] * x[0] + ek[1] * x[1])).cos()).sum()
        })
    }

    /// Σ c_i x^i in the first coordinate.
    pub fn polynomial(coeffs: Vec<f64>) -> ScalarField {
        let label = format!("poly{coeffs:?}");
        ScalarField::stationary(label, move |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x[0] + c))
    }

    /// amp · cos(k·x + phase).
    pub fn trigonometric(amp: f64, k: [f64; 2], phase: f64) -> ScalarField {
        ScalarField::stationary(format!("{amp}cos({k:?}.x+{phase})"), move |x| {
            amp * (k[0] * x[0] + k[1] * x[1] + phase).cos()
        })
    }

    /// amp · cos(ω t) · g(x) with closed-form antiderivative.
    pub fn oscillating(amp: f64, omega: f64, base: ScalarField) -> ScalarField {
        let b1 = base.clone();
        let b2 = base;
        ScalarField::dynamic(format!("{amp}cos({omega}t)"), move |t, x| amp * (omega * t).cos() * b1.eval(0.0, x))
            .with_antiderivative(move |t, x| amp * (omega * t).sin() / omega * b2.eval(0.0, x))
    }
}
