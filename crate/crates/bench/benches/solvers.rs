use abphase::conductor::{canonical_shield, solenoid_probes, ChargeSolver, ShieldSolver};
use abphase::{discretize_solenoid, CurrentElement, Distribution, QuadratureSettings, SolenoidSpec, SurfaceMesh, Vec3};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn charge_factorization(c: &mut Criterion) {
    let mut g = c.benchmark_group("charge_solver");
    g.sample_size(10);
    for level in [2, 3] {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, level).unwrap();
        g.bench_with_input(BenchmarkId::new("factor_icosphere", mesh.len()), &mesh, |b, m| {
            b.iter(|| ChargeSolver::new(m, true).unwrap())
        });
        let solver = ChargeSolver::new(&mesh, true).unwrap();
        let q = Distribution::new("q", vec![CurrentElement::charge(Vec3::new(2.0, 0.0, 0.0), 1e-9)]).unwrap();
        let s = QuadratureSettings::default();
        g.bench_with_input(BenchmarkId::new("solve_icosphere", mesh.len()), &q, |b, q| {
            b.iter(|| solver.solve(q, &s).unwrap())
        });
    }
    g.finish();
}

fn shield(c: &mut Criterion) {
    let spec = SolenoidSpec {
        radius: 0.2,
        length: 2.0,
        turns: 1000,
        current: 1.0,
        axis: Vec3::z(),
        center: Vec3::zeros(),
    };
    let solenoid = discretize_solenoid(&spec, 100, 32).unwrap();
    let probes = solenoid_probes(&spec, 125).unwrap();
    let s = QuadratureSettings::default();
    let particle = Distribution::new(
        "particle",
        vec![CurrentElement::new(Vec3::new(3.0, 0.0, 0.0), 1.6e-19, Vec3::new(0.0, 1.6e-19 * 1e5, 0.0))],
    )
    .unwrap();
    let mut g = c.benchmark_group("shield");
    g.sample_size(10);
    let mesh = canonical_shield(Vec3::zeros(), Vec3::z(), 1.0, 3.0, 500).unwrap();
    g.bench_function("factor_500", |b| b.iter(|| ShieldSolver::new(&mesh, &probes, &s).unwrap()));
    let solver = ShieldSolver::new(&mesh, &probes, &s).unwrap();
    g.bench_function("evaluate_500", |b| b.iter(|| solver.evaluate(&particle, &solenoid, &s).unwrap()));
    g.finish();
}

criterion_group!(benches, charge_factorization, shield);
criterion_main!(benches);
