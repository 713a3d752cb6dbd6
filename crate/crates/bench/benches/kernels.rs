use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use elliptic_core::ensemble::{sample_matrix, sample_pair, CounterRng};
use elliptic_core::limitlaw::{limit_density, solve_point, SolverOptions, DEFAULT_X_STEP};
use elliptic_core::spectral;
use elliptic_core::svlab::levy_concentration;
use elliptic_core::{Complex64, EnsembleSpec, PairDist};

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_matrix");
    for n in [100, 400] {
        let spec = EnsembleSpec::new(n, 0.5, PairDist::Gaussian, 1).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &spec, |b, spec| {
            b.iter(|| sample_matrix(spec, black_box(3)))
        });
    }
    g.finish();
}

fn decompositions(c: &mut Criterion) {
    let spec = EnsembleSpec::new(200, 0.5, PairDist::Gaussian, 1).unwrap();
    let m = sample_matrix(&spec, 0);
    let z = Complex64::new(0.5, 0.5);
    let mut g = c.benchmark_group("n200");
    g.sample_size(20);
    g.bench_function("eigenvalues", |b| b.iter(|| spectral::eigenvalues(black_box(&m)).unwrap()));
    g.bench_function("singular_values", |b| b.iter(|| spectral::singular_values(black_box(&m), z).unwrap()));
    g.bench_function("resolvent_traces", |b| {
        b.iter(|| spectral::resolvent_traces(black_box(&m), z, Complex64::new(0.1, 0.5)).unwrap())
    });
    g.finish();
}

fn limit_solver(c: &mut Criterion) {
    let z = Complex64::new(0.5, 0.3);
    c.bench_function("solve_point", |b| {
        b.iter(|| solve_point(black_box(Complex64::new(0.4, 1e-4)), z, 0.5, 1e-12).unwrap())
    });
    let mut g = c.benchmark_group("limit_density");
    g.sample_size(10);
    g.bench_function("default_grid", |b| {
        b.iter(|| limit_density(z, 0.5, &SolverOptions::default(), DEFAULT_X_STEP).unwrap())
    });
    g.finish();
}

fn normals(count: usize) -> Vec<f64> {
    let mut rng = CounterRng::new(5).aux(0, 0);
    (0..count)
        .map(|_| sample_pair(0.0, PairDist::Gaussian, &mut rng).unwrap().0)
        .collect()
}

fn concentration(c: &mut Criterion) {
    let x = normals(100_000);
    c.bench_function("levy_concentration_1e5", |b| {
        b.iter(|| levy_concentration(black_box(&x), 0.1).unwrap())
    });
}

criterion_group!(benches, sampling, decompositions, limit_solver, concentration);
criterion_main!(benches);
