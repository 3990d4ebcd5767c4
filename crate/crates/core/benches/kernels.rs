use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use dirac_core::expint::{EwiState, TsfpState};
use dirac_core::fdtd::FdtdState;
use dirac_core::grid::{Grid, Grid1D, Grid2D};
use dirac_core::harness::{run_convergence, ExperimentSpec, Preset, ReferenceSpec, TauSpec};
use dirac_core::par::Exec;
use dirac_core::spectral::SpectralPlan;
use dirac_core::{Complex64, PotentialSet, ScalarField, Scheme, SimParams, SpinorField, Stepper};

const MODES: [Exec; 2] = [Exec::Sequential, Exec::Parallel];

fn label(e: Exec) -> &'static str {
    match e {
        Exec::Sequential => "seq",
        Exec::Parallel => "par",
    }
}

fn params_1d(m: usize) -> SimParams {
    let g = Grid1D::new(-16.0, 16.0, m).unwrap();
    let pots = PotentialSet::new(
        ScalarField::stationary("v", |x| (1.0 - x[0]) / (1.0 + x[0] * x[0])),
        vec![ScalarField::stationary("a", |x| (x[0] + 1.0).powi(2) / (1.0 + x[0] * x[0]))],
    )
    .unwrap();
    let init = SpinorField::from_fn(Grid::D1(g), |x| {
        [Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0), Complex64::new((-(x[0] - 1.0).powi(2) / 2.0).exp(), 0.0)]
    });
    SimParams::new(0.5, 1e-4, 1.0, pots, init).unwrap()
}

fn params_2d(m: usize) -> SimParams {
    let g = Grid2D::square(-10.0, 10.0, m).unwrap();
    let pots = PotentialSet::new(ScalarField::stationary("v", |x| (x[0].cos() * x[1].cos()).powi(2)), vec![]).unwrap();
    let init = SpinorField::from_fn(Grid::D2(g), |x| {
        let r = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
        [Complex64::new(r, 0.0), Complex64::new(0.0, r)]
    });
    SimParams::new(0.5, 1e-3, 1.0, pots, init).unwrap()
}

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_2d");
    for m in [128usize, 512] {
        let p = params_2d(m);
        group.throughput(Throughput::Elements((m * m) as u64));
        for exec in MODES {
            let plan = SpectralPlan::new(p.grid).with_exec(exec);
            group.bench_with_input(BenchmarkId::new(label(exec), m), &p.initial, |b, f| {
                b.iter(|| plan.synthesize(&plan.analyze(black_box(f))))
            });
        }
    }
    group.finish();
}

fn bench_pseudospectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_2d");
    group.sample_size(20);
    let m = 256;
    let p = params_2d(m);
    group.throughput(Throughput::Elements((m * m) as u64));
    for exec in MODES {
        let mut ts = TsfpState::new(p.clone()).unwrap().with_exec(exec);
        group.bench_function(BenchmarkId::new(format!("tsfp/{}", label(exec)), m), |b| b.iter(|| ts.step().unwrap()));
        let mut ewi = EwiState::new(p.clone()).unwrap().with_exec(exec);
        group.bench_function(BenchmarkId::new(format!("ewi/{}", label(exec)), m), |b| b.iter(|| ewi.step().unwrap()));
    }
    group.finish();
}

fn bench_fdtd(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_1d");
    let m = 1 << 16;
    let p = params_1d(m);
    group.throughput(Throughput::Elements(m as u64));
    for s in [Scheme::Lffd, Scheme::Sifd1, Scheme::Sifd2, Scheme::Cnfd] {
        for exec in MODES {
            let mut st = FdtdState::new(s, p.clone()).unwrap().with_exec(exec);
            group.bench_function(BenchmarkId::new(format!("{s}/{}", label(exec)), m), |b| b.iter(|| st.step().unwrap()));
        }
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("convergence_sweep");
    group.sample_size(10);
    for exec in MODES {
        let mut spec = ExperimentSpec::new(Preset::Gaussian1d, vec![Scheme::Tsfp, Scheme::EwiFp, Scheme::Cnfd]);
        spec.eps = vec![1.0, 0.5];
        spec.h = vec![1.0 / 4.0];
        spec.tau = vec![TauSpec::Value(0.02), TauSpec::Value(0.01)];
        spec.t_final = 0.2;
        spec.reference = ReferenceSpec::tsfp(1.0 / 8.0, 1e-3);
        spec.reference.self_check = false;
        spec.exec = exec;
        group.bench_function(label(exec), |b| b.iter(|| run_convergence(black_box(&spec)).unwrap()));
    }
    group.finish();
}

criterion_group!(kernels, bench_fft, bench_pseudospectral, bench_fdtd);
criterion_group!(sweeps, bench_sweep);
criterion_main!(kernels, sweeps);
