mod common;

use common::cx;
use dirac_core::grid::{Grid, Grid1D, Grid2D};
use dirac_core::spectral::{
    analyze, interpolate_1d, naive_dft, naive_idft, spectral_derivative, synthesize, SpectralPlan, Transform,
};
use dirac_core::{Complex64, SpinorField};
use proptest::prelude::*;

fn field_from(grid: Grid, vals: &[(f64, f64)]) -> SpinorField {
    let n = grid.nodes();
    let comps = (0..2)
        .map(|c| (0..n).map(|j| cx(vals[(c * n + j) % vals.len()].0, vals[(c * n + j) % vals.len()].1)).collect())
        .collect();
    SpinorField::from_components(grid, comps).unwrap()
}

fn sizes() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 4, 6, 8, 10, 16, 30, 64])
}

fn values() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..200)
}

proptest! {
    #[test]
    fn fft_matches_direct_sum(m in sizes(), vals in values(), a in -3.0..3.0f64) {
        let g = Grid::D1(Grid1D::new(a, a + 2.0, m).unwrap());
        let u = field_from(g, &vals);
        let fast = analyze(&u);
        for c in 0..2 {
            let slow = naive_dft(u.component(c));
            for (x, y) in fast.component(c).iter().zip(&slow) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval(m1 in sizes(), m2 in sizes(), vals in values()) {
        let g = Grid::D2(Grid2D::new(Grid1D::new(0.0, 1.0, m1).unwrap(), Grid1D::new(-2.0, 2.0, m2).unwrap()));
        let u = field_from(g, &vals);
        let plan = SpectralPlan::new(g);
        let modes = plan.analyze(&u);
        let back = plan.synthesize(&modes);
        for (x, y) in back.data().iter().zip(u.data()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        // Σ|U_j|²/M = Σ|Ũ_l|²
        let lhs: f64 = u.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / g.nodes() as f64;
        prop_assert!((lhs - modes.energy()).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn linear(m in sizes(), vals in values(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let g = Grid::D1(Grid1D::new(0.0, 1.0, m).unwrap());
        let u = field_from(g, &vals);
        let mut w = field_from(g, &vals[vals.len() / 2..].iter().chain(&vals[..1]).cloned().collect::<Vec<_>>());
        let k = cx(re, im);
        let (mu, mw) = (analyze(&u), analyze(&w));
        w.axpy(k, &u);
        let mc = analyze(&w);
        for i in 0..mc.data().len() {
            prop_assert!((mc.data()[i] - (mw.data()[i] + k * mu.data()[i])).norm() < 1e-11);
        }
    }

    #[test]
    fn naive_pair_inverts(vals in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..40)) {
        let mut u: Vec<Complex64> = vals.iter().map(|&(a, b)| cx(a, b)).collect();
        if u.len() % 2 == 1 {
            u.push(cx(0.5, 0.5));
        }
        let back = naive_idft(&naive_dft(&u));
        for (x, y) in back.iter().zip(&u) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn derivative_of_band_limited_function_is_exact() {
    let g = Grid1D::new(-std::f64::consts::PI, std::f64::consts::PI, 32).unwrap();
    let u = SpinorField::from_fn(Grid::D1(g), |x| [cx((3.0 * x[0]).sin(), 0.0), cx((x[0]).cos(), (2.0 * x[0]).sin())]);
    let d = spectral_derivative(&u, 0).unwrap();
    let want =
        SpinorField::from_fn(Grid::D1(g), |x| [cx(3.0 * (3.0 * x[0]).cos(), 0.0), cx(-(x[0]).sin(), 2.0 * (2.0 * x[0]).cos())]);
    for (a, b) in d.data().iter().zip(want.data()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn derivative_along_second_axis() {
    let g = Grid::D2(Grid2D::square(0.0, 2.0 * std::f64::consts::PI, 16).unwrap());
    let u = SpinorField::from_fn(g, |x| [cx(x[0].sin() * (2.0 * x[1]).cos(), 0.0), cx(0.0, 0.0)]);
    let d = spectral_derivative(&u, 1).unwrap();
    let want = SpinorField::from_fn(g, |x| [cx(-2.0 * x[0].sin() * (2.0 * x[1]).sin(), 0.0), cx(0.0, 0.0)]);
    for (a, b) in d.data().iter().zip(want.data()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn interpolant_reproduces_nodes_and_off_grid_modes() {
    let g = Grid1D::new(-1.0, 1.0, 12).unwrap();
    let f = |x: f64| Complex64::from_polar(1.0, g.freq(2) * (x + 1.0)) + cx(0.5 * (g.freq(1) * (x + 1.0)).cos(), 0.0);
    let u = SpinorField::from_fn(Grid::D1(g), |x| [f(x[0]), cx(0.0, 0.0)]);
    let m = analyze(&u);
    for x in [-0.93, -0.1, 0.0, 0.377, 0.99] {
        assert!((interpolate_1d(&g, m.component(0), x) - f(x)).norm() < 1e-13);
    }
}

#[test]
fn backends_agree_1d() {
    let g = Grid::D1(Grid1D::new(0.0, 3.0, 24).unwrap());
    let u = SpinorField::from_fn(g, |x| [cx(x[0].exp(), 1.0), cx(0.0, x[0] * x[0])]);
    let a = SpectralPlan::with_backend(g, Transform::Direct).analyze(&u);
    let b = SpectralPlan::with_backend(g, Transform::Fft).analyze(&u);
    for (x, y) in a.data().iter().zip(b.data()) {
        assert!((x - y).norm() < 1e-12);
    }
    assert_eq!(synthesize(&b).grid(), &g);
}
