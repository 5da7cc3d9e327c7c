use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wamcyl::{
    control_mesh, enumerate_basis, lebesgue_constant, vandermonde, ControlSchedule, Method,
    PreparedMesh, Wam,
};

fn bench_vandermonde(c: &mut Criterion) {
    let mut g = c.benchmark_group("vandermonde");
    for n in [5usize, 10, 15] {
        let mesh = Wam::Wam2.generate(n).unwrap();
        let basis = enumerate_basis(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| vandermonde(&basis, black_box(mesh.points())).unwrap())
        });
    }
    g.finish();
}

fn bench_prepare(c: &mut Criterion) {
    let mut g = c.benchmark_group("orthogonalize");
    g.sample_size(10);
    for (wam, n) in [(Wam::Wam1, 8), (Wam::Wam2, 8), (Wam::Wam2, 12)] {
        let mesh = wam.generate(n).unwrap();
        g.bench_function(format!("{wam}/n{n}"), |b| {
            b.iter(|| PreparedMesh::new(black_box(mesh.clone()), n, 2).unwrap())
        });
    }
    g.finish();
}

fn bench_extract(c: &mut Criterion) {
    let mut g = c.benchmark_group("extract");
    g.sample_size(10);
    let n = 10;
    let prepared = PreparedMesh::new(Wam::Wam2.generate(n).unwrap(), n, 2).unwrap();
    for m in Method::ALL {
        g.bench_function(format!("wam2/n{n}/{m}"), |b| {
            b.iter(|| prepared.extract(black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn bench_lebesgue(c: &mut Criterion) {
    let mut g = c.benchmark_group("lebesgue");
    g.sample_size(10);
    let n = 8;
    let nodes = PreparedMesh::new(Wam::Wam1.generate(n).unwrap(), n, 2)
        .unwrap()
        .extract(Method::Afp)
        .unwrap();
    let control = control_mesh(Wam::Wam1, n, ControlSchedule::Standard).unwrap();
    g.bench_function("wam1/n8/afp", |b| {
        b.iter(|| lebesgue_constant(black_box(&nodes), control.points()).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_vandermonde,
    bench_prepare,
    bench_extract,
    bench_lebesgue
);
criterion_main!(benches);
