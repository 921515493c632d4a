use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;
use nodal_core::discrete::{assemble_hamiltonian, eigen_decompose, verify_bounds, Potential};
use nodal_core::metric::{find_lowest, MetricGraph};
use nodal_core::riccati::{gershgorin_bounds, locate_eigenvalues};
use nodal_core::verify::{fd_oracle, instance_rng, random_connected_graph, random_tree};

fn potential(n: usize) -> Potential {
    Potential((0..n).map(|v| (1.7 * v as f64).sin()).collect())
}

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen_decompose");
    for n in [12, 32, 64] {
        let g = random_connected_graph(&mut instance_rng(1, n), n, 3);
        let h: DMatrix<f64> = assemble_hamiltonian(&g, &potential(n)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| b.iter(|| eigen_decompose(black_box(h))));
    }
    group.finish();
}

fn riccati(c: &mut Criterion) {
    let mut group = c.benchmark_group("locate_eigenvalues");
    for n in [16, 64] {
        let t = random_tree(&mut instance_rng(2, n), n).root_tree(0).unwrap();
        let q = potential(n);
        let (lo, hi) = gershgorin_bounds(&t, &q);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(t, q), |b, (t, q)| {
            b.iter(|| locate_eigenvalues(t, q, lo - 1.0, hi + 1.0))
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    let g = random_connected_graph(&mut instance_rng(3, 0), 12, 5);
    let q = potential(12);
    c.bench_function("verify_bounds/12", |b| b.iter(|| verify_bounds(black_box(&g), &q)));
}

fn metric_graph(seed: u64, vertices: usize, ell: usize) -> MetricGraph {
    let g = random_connected_graph(&mut instance_rng(seed, vertices), vertices, ell);
    let lengths = (0..g.edge_count()).map(|e| 1.0 + 0.4 * (2.3 * e as f64).sin()).collect();
    MetricGraph::kirchhoff(g, lengths).unwrap()
}

fn metric(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_lowest");
    group.sample_size(20);
    for (name, mg) in [("tree10", metric_graph(4, 11, 0)), ("ell3", metric_graph(5, 8, 3))] {
        group.bench_with_input(BenchmarkId::new(name, 25), &mg, |b, mg| b.iter(|| find_lowest(mg, 25)));
    }
    group.finish();
}

fn fd(c: &mut Criterion) {
    let mg = metric_graph(6, 6, 0);
    let h = mg.lengths().iter().copied().fold(f64::INFINITY, f64::min) / 32.0;
    let mut group = c.benchmark_group("fd_oracle");
    group.sample_size(20);
    group.bench_function("tree6", |b| b.iter(|| fd_oracle(&mg, h)));
    group.finish();
}

criterion_group!(benches, jacobi, riccati, bounds, metric, fd);
criterion_main!(benches);
