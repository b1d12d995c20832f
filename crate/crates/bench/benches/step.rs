use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use pfdtd_core::{
    cavity_initial_scalar, cavity_initial_vector, cavity_params, cfl_limit, init_scalar, init_vector, step_scalar,
    step_vector, uniform_materials, CavityDrive, GridIndex, GridSpec, SystemKind, EPS0, MU0,
};

fn grid(n: usize) -> GridIndex {
    let h = 0.1 / n as f64;
    GridIndex::new(GridSpec::uniform(n, n, n, h).unwrap()).unwrap()
}

fn bench_steps(c: &mut Criterion) {
    let mode = cavity_params(0.1, 1e-9).unwrap();
    let mut group = c.benchmark_group("step");
    for n in [16, 32] {
        let g = grid(n);
        let m = uniform_materials(&g, 1.0, 1.0).unwrap();
        let dt = 0.99 * cfl_limit(g.spec(), EPS0, MU0).unwrap();
        group.throughput(Throughput::Elements(g.node_count() as u64));

        let mut s = init_scalar(&g, &m, dt, &cavity_initial_scalar(&g, &mode, dt).unwrap()).unwrap();
        let u = CavityDrive::new(&g, &mode, SystemKind::Scalar, dt).unwrap().inputs(0);
        group.bench_with_input(BenchmarkId::new("scalar", n), &n, |b, _| b.iter(|| step_scalar(&mut s, &u).unwrap()));

        let mut v = init_vector(&g, &m, dt, &cavity_initial_vector(&g, &mode, dt).unwrap()).unwrap();
        let u = CavityDrive::new(&g, &mode, SystemKind::Vector, dt).unwrap().inputs(0);
        let (u_perp, u_btan) = u.split_at(v.perp_sites().len());
        group.bench_with_input(BenchmarkId::new("vector", n), &n, |b, _| {
            b.iter(|| step_vector(&mut v, u_perp, u_btan).unwrap())
        });

        group.bench_with_input(BenchmarkId::new("vector_storage", n), &n, |b, _| b.iter(|| v.storage()));
    }
    group.finish();
}

criterion_group!(benches, bench_steps);
criterion_main!(benches);
