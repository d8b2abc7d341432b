//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line in plain `cargo test` output.
//! Tolerances are pinned below; the process exits non-zero on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use abphase::conductor::{
    canonical_shield, lorentz_consistency_check, shield_locality_phases, solenoid_probes,
    tube_axis_arm, verify_ac_tube_cancellation, ChargeSolver, ShieldSolver, DEFAULT_PROBE_COUNT,
};
use abphase::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE};
use abphase::kernel::nearest_distance;
use abphase::*;
use num_complex::Complex64;

const FOURIER_TOL: f64 = 1e-3;
const FOURIER_SECONDS: f64 = 1.0;
const COULOMB_TOL: f64 = 1e-9;
const NEUMANN_TOL: f64 = 0.005;
const NEUMANN_SECONDS: f64 = 5.0;
const AB_TOL: f64 = 0.01;
const AB_SPREAD: f64 = 0.005;
const AB_SECONDS: f64 = 30.0;
const ELECTRIC_TOL: f64 = 1e-10;
const AC_TOL: f64 = 0.02;
const SPHERE_TOL: f64 = 0.01;
const PLATE_TOL: f64 = 0.02;
const SHIELD_TOL: f64 = 0.05;
const CURL_TOL: f64 = 0.05;
const LOCALITY_SHIFT: f64 = 0.005;
const SHIELD_PANELS: usize = 3000;
const SHIELD_SECONDS: f64 = 300.0;
const LORENTZ_TOL: f64 = 0.02;
const WITNESS_MIN: f64 = 0.10;
const TUBE_TOL: f64 = 0.05;
const NORMALIZATION_TOL: f64 = 1e-6;
const FD_FORCE_TOL: f64 = 1e-4;

/// Neumann mutual inductance of two coaxial 0.1 m loops 0.05 m apart,
/// computed once with a 2e5-interval Simpson rule (see `neumann` below,
/// which recomputes it at run time as a cross-check).
const NEUMANN_M: f64 = 1.112_610_894_1e-7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn settings() -> QuadratureSettings {
    QuadratureSettings::default()
}

fn hbar() -> f64 {
    PhysicalConstants::SI.hbar
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn neumann(a: f64, b: f64, d: f64) -> f64 {
    let f = |phi: f64| phi.cos() / (a * a + b * b + d * d - 2.0 * a * b * phi.cos()).sqrt();
    PhysicalConstants::SI.mu0_over_4pi() * a * b * 2.0 * PI * 2.0 * simpson(f, 0.0, PI, 200_000)
}

fn ring(label: &str, radius: f64, z: f64, n: usize) -> Distribution {
    let p = |k: usize| {
        let t = 2.0 * PI * k as f64 / n as f64;
        Vec3::new(t.cos() * radius, t.sin() * radius, z)
    };
    let elements = (0..n)
        .map(|k| CurrentElement::current((p(k) + p(k + 1)) / 2.0, p(k + 1) - p(k)))
        .collect();
    Distribution::new(label, elements).unwrap()
}

fn single(label: &str, at: Vec3, q: f64) -> Distribution {
    Distribution::new(label, vec![CurrentElement::charge(at, q)]).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let v = fourier_kernel_check(1.0, 1000.0, 4001, 4001).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = rel(v, 1.0 / (4.0 * PI));
    outcome(
        err < FOURIER_TOL && secs < FOURIER_SECONDS,
        format!(
            "fourier kernel identity r=1 k_max=1000: value {v:.9}, rel err {err:.3e} (tol {FOURIER_TOL:e}), {secs:.2} s (limit {FOURIER_SECONDS} s)"
        ),
    )
}

fn criterion_2() -> Outcome {
    let a = single("a", Vec3::zeros(), 1.0);
    let b = single("b", Vec3::x(), 1.0);
    let ab = interaction_energy(&a, &b, &settings()).unwrap();
    let ba = interaction_energy(&b, &a, &settings()).unwrap();
    let err = rel(ab.value, 8.987_551_792_3e9);
    let coarse = rel(ab.value, 8.98755e9);
    // symmetry on a less trivial pair too
    let x = ring("x", 0.3, 0.0, 40).merged_with_charge(0.2);
    let y = ring("y", 0.2, 0.4, 30).merged_with_charge(-0.1);
    let xy = interaction_energy(&x, &y, &settings()).unwrap().value;
    let yx = interaction_energy(&y, &x, &settings()).unwrap().value;
    let symmetric = ab.value.to_bits() == ba.value.to_bits() && xy.to_bits() == yx.to_bits();
    outcome(
        err < COULOMB_TOL && coarse < 1e-6 && symmetric,
        format!(
            "coulomb oracle: {:.10e} J, rel err {err:.2e} vs 1/(4 pi eps0) (tol {COULOMB_TOL:e}), bit-exact symmetry {symmetric}",
            ab.value
        ),
    )
}

trait WithCharge {
    fn merged_with_charge(self, q: f64) -> Distribution;
}

impl WithCharge for Distribution {
    fn merged_with_charge(self, q: f64) -> Distribution {
        let n = self.len() as f64;
        let elements = self
            .elements()
            .iter()
            .map(|e| CurrentElement::new(e.position, q / n, e.current_moment))
            .collect();
        Distribution::new(self.label().to_string(), elements).unwrap()
    }
}

fn criterion_3() -> Outcome {
    let (a, d) = (0.1, 0.05);
    let live = neumann(a, a, d);
    let start = Instant::now();
    let e = interaction_energy(&ring("l1", a, 0.0, 256), &ring("l2", a, d, 256), &settings()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let err = rel(-e.current_part, NEUMANN_M);
    let oracle_ok = rel(live, NEUMANN_M) < 1e-9;
    outcome(
        err < NEUMANN_TOL && secs < NEUMANN_SECONDS && oracle_ok,
        format!(
            "mutual inductance 256 seg/loop: -current_part {:.10e} vs I^2 M {NEUMANN_M:.10e}, rel err {err:.3e} (tol {NEUMANN_TOL}), oracle recomputed {live:.10e}, {secs:.3} s (limit {NEUMANN_SECONDS} s)",
            -e.current_part
        ),
    )
}

fn arc(r: f64, from: f64, to: f64, carrier: Carrier) -> PathSpec {
    PathSpec::arc(Vec3::zeros(), Vec3::z(), r, from, to, 201, 0.0, 1e-7, carrier).unwrap()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let r = 0.05;
    let spec = SolenoidSpec {
        radius: 0.01,
        length: 40.0 * r,
        turns: 4000,
        current: 0.5,
        axis: Vec3::z(),
        center: Vec3::zeros(),
    };
    let source = discretize_solenoid(&spec, 800, 64).unwrap();
    let q = Carrier::Charge(ELEMENTARY_CHARGE);
    let scale = ELEMENTARY_CHARGE * spec.ideal_flux() / hbar();
    let run = |a1: &PathSpec, a2: &PathSpec| magnetic_ab_loop_difference(a1, a2, &source, Some(&spec), &settings()).unwrap();

    // split at (+-r, 0): arm1 below, arm2 above
    let semicircles = run(&arc(r, PI, 2.0 * PI, q), &arc(r, PI, 0.0, q));
    let poly = |pts: &[[f64; 2]]| {
        // 100 samples per leg keep the midpoint rule well resolved
        let corners: Vec<Vec3> = pts.iter().map(|p| Vec3::new(p[0], p[1], 0.0)).collect();
        let mut dense = vec![corners[0]];
        for w in corners.windows(2) {
            dense.extend((1..=100).map(|k| w[0] + (w[1] - w[0]) * (k as f64 / 100.0)));
        }
        PathSpec::polyline(&dense, 0.0, 1e-7, q).unwrap()
    };
    let boxes = run(
        &poly(&[[-r, 0.0], [-r, -0.8 * r], [r, -0.8 * r], [r, 0.0]]),
        &poly(&[[-r, 0.0], [-0.6 * r, 1.5 * r], [0.3 * r, 0.9 * r], [r, 0.0]]),
    );
    let ellipse = |sign: f64| {
        let pts: Vec<(f64, Vec3)> = (0..=200)
            .map(|k| {
                let t = PI * k as f64 / 200.0;
                (1e-7 * k as f64 / 200.0, Vec3::new(-r * t.cos(), sign * 2.0 * r * t.sin(), 0.01 * t.sin()))
            })
            .collect();
        PathSpec::new(pts, q).unwrap()
    };
    let ellipses = run(&ellipse(-1.0), &ellipse(1.0));
    // both arms beside the solenoid: no enclosed flux
    let outside = run(&poly(&[[0.2, 0.0], [0.25, -0.03], [0.3, 0.0]]), &poly(&[[0.2, 0.0], [0.25, 0.04], [0.3, 0.0]]));
    // the shortest solenoid the criterion admits
    let short = SolenoidSpec { length: 20.0 * r, ..spec };
    let short_source = discretize_solenoid(&short, 400, 64).unwrap();
    let short_err = magnetic_ab_loop_difference(&arc(r, PI, 2.0 * PI, q), &arc(r, PI, 0.0, q), &short_source, Some(&short), &settings())
        .unwrap()
        .relative_error
        .unwrap();
    let secs = start.elapsed().as_secs_f64();

    let errs: Vec<f64> = [&semicircles, &boxes, &ellipses].iter().map(|p| p.relative_error.unwrap()).collect();
    let diffs: Vec<f64> = [&semicircles, &boxes, &ellipses].iter().map(|p| p.difference).collect();
    let spread = (diffs.iter().cloned().fold(f64::MIN, f64::max) - diffs.iter().cloned().fold(f64::MAX, f64::min)) / scale;
    let leak = outside.difference.abs() / scale;
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst < AB_TOL && short_err < AB_TOL && leak < AB_TOL && spread < AB_SPREAD && secs < AB_SECONDS,
        format!(
            "magnetic AB, L = 40 loop radii: enclosing rel err {:.3e}/{:.3e}/{:.3e} (tol {AB_TOL}), at 20 radii {short_err:.3e}, non-enclosing {leak:.3e} of q Phi/hbar (tol {AB_TOL}), shape spread {spread:.3e} (tol {AB_SPREAD}), reference {:.6e} rad, {secs:.2} s (limit {AB_SECONDS} s)",
            errs[0],
            errs[1],
            errs[2],
            semicircles.reference.unwrap()
        ),
    )
}

fn criterion_5() -> Outcome {
    let (v, t, q) = (2.5e-6, 3.0e-9, ELEMENTARY_CHARGE);
    let u2 = PotentialTimeline::new(vec![(0.0, v), (1.1e-9, v), (t, v)]).unwrap();
    let u3 = PotentialTimeline::new(vec![(0.0, 0.0), (t, 0.0)]).unwrap();
    let r = electric_ab_phase(&u2, &u3, q).unwrap();
    let expected = q * v * t / hbar();
    let err = rel(r.difference, expected);
    outcome(
        err < ELECTRIC_TOL,
        format!("electric AB constant V: {:.12e} rad vs qVT/hbar {expected:.12e}, rel err {err:.2e} (tol {ELECTRIC_TOL:e})", r.difference),
    )
}

fn criterion_6() -> Outcome {
    let r = 0.05;
    let spec = WireSpec {
        linear_charge_density: 1e-9,
        axis: Vec3::z(),
        center: Vec3::zeros(),
        length: 100.0 * r,
    };
    let wire = discretize_wire(&spec, 2000).unwrap();
    let mu = 9.274e-24;
    let carrier = |m: Vec3| Carrier::MagneticMoment { moment: m, loop_edge: 1e-3 };
    let arms = |m: Vec3| (arc(r, PI, 2.0 * PI, carrier(m)), arc(r, PI, 0.0, carrier(m)));
    let (a1, a2) = arms(Vec3::z() * mu);
    let aligned = ac_loop_difference(&a1, &a2, &wire, &spec, &settings()).unwrap();
    let pairwise = ac_arm_phase_pairwise(&a2, &wire, &settings()).unwrap()
        - ac_arm_phase_pairwise(&a1, &wire, &settings()).unwrap();
    let (p1, p2) = arms(Vec3::x() * mu);
    let perpendicular = ac_loop_difference(&p1, &p2, &wire, &spec, &settings()).unwrap();
    let pc = PhysicalConstants::SI;
    let scale = pc.mu0 * mu * spec.linear_charge_density / pc.hbar;
    let err = aligned.relative_error.unwrap();
    let perp = perpendicular.difference.abs() / scale;
    let routes = rel(pairwise, aligned.difference);
    outcome(
        err < AC_TOL && perp < AC_TOL && routes < AC_TOL,
        format!(
            "AC phase, wire 100 loop radii / 2000 elements: rel err {err:.3e} vs mu0 mu lambda/hbar = {:.6e} rad (tol {AC_TOL}), perpendicular {perp:.3e} (tol {AC_TOL}), pairwise route {routes:.3e} (tol {AC_TOL})",
            aligned.reference.unwrap()
        ),
    )
}

fn criterion_7() -> Outcome {
    let q = 1e-9;
    let sphere = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 3).unwrap();
    let sol = abphase::conductor::solve_induced_charge(&sphere, &single("q", Vec3::new(2.0, 0.0, 0.0), q), true, &settings())
        .unwrap();
    let sphere_err = rel(sol.total_charge, -q / 2.0);

    let d = 0.1;
    let plate = SurfaceMesh::plate(Vec3::zeros(), Vec3::z(), 10.0 * d, 40, 2.0).unwrap();
    let solver = ChargeSolver::new(&plate, true).unwrap();
    let at = Vec3::new(0.0, 0.0, d);
    let induced = solver.solve(&single("q", at, q), &settings()).unwrap();
    let force = solver.induced_field(&induced, at) * q;
    let image = PhysicalConstants::SI.coulomb() * q * q / (4.0 * d * d);
    let plate_err = rel(-force.z, image);
    let lateral = (force.x.hypot(force.y)) / image;
    outcome(
        sphere_err < SPHERE_TOL && plate_err < PLATE_TOL && lateral < PLATE_TOL,
        format!(
            "BEM charge: sphere {} panels total {:.6e} C vs -qR/d, rel err {sphere_err:.3e} (tol {SPHERE_TOL}); plate {} panels image force rel err {plate_err:.3e} (tol {PLATE_TOL})",
            sphere.len(),
            sol.total_charge,
            plate.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let r = 1.0;
    let mesh = canonical_shield(Vec3::zeros(), Vec3::z(), r, 3.0 * r, 2000).unwrap();
    let spec = SolenoidSpec {
        radius: 0.2 * r,
        length: 2.0 * r,
        turns: 200,
        current: 1.0,
        axis: Vec3::z(),
        center: Vec3::zeros(),
    };
    let solenoid = discretize_solenoid(&spec, 100, 32).unwrap();
    let probes = solenoid_probes(&spec, DEFAULT_PROBE_COUNT).unwrap();
    let shield = ShieldSolver::new(&mesh, &probes, &settings()).unwrap();

    let q = ELEMENTARY_CHARGE;
    let particle = Distribution::new(
        "particle",
        vec![CurrentElement::new(Vec3::new(3.0 * r, 0.0, 0.0), q, Vec3::new(0.0, 1e5, 0.0) * q)],
    )
    .unwrap();
    let report = shield.evaluate(&particle, &solenoid, &settings()).unwrap();

    let arm = PathSpec::arc(Vec3::zeros(), Vec3::z(), 3.0 * r, -PI / 2.0, PI / 2.0, 13, 0.0, 1e-5, Carrier::Charge(q)).unwrap();
    let phases = shield_locality_phases(&arm, &solenoid, &shield, &settings()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        report.cancellation_residual < SHIELD_TOL
            && report.curl_residual < CURL_TOL
            && phases.shift < LOCALITY_SHIFT
            && phases.max_cancellation_residual < SHIELD_TOL
            && mesh.len() <= SHIELD_PANELS
            && secs < SHIELD_SECONDS,
        format!(
            "shielding, {} panels: cancellation {:.3e} (tol {SHIELD_TOL}), curl {:.3e} (tol {CURL_TOL}), residual_b {:.3e}, locality shift {:.3e} (tol {LOCALITY_SHIFT}), arm worst cancellation {:.3e}, collapse {:.3e}, {secs:.1} s (limit {SHIELD_SECONDS} s)",
            mesh.len(),
            report.cancellation_residual,
            report.curl_residual,
            report.residual_b,
            phases.shift,
            phases.max_cancellation_residual,
            phases.collapse
        ),
    )
}

fn criterion_9() -> Outcome {
    let d = 0.1;
    let q = 1e-9;
    let plate = SurfaceMesh::plate(Vec3::zeros(), Vec3::z(), 10.0 * d, 32, 2.0).unwrap();
    let charge = single("q1", Vec3::new(0.0, 0.0, d), q);
    let plane = lorentz_consistency_check(&charge, None, &plate, &settings()).unwrap();
    let agree = (plane.f_gradient - plane.f_local).norm() / plane.f_local.norm();
    let image = PhysicalConstants::SI.coulomb() * q * q / (4.0 * d * d);
    let image_err = rel(-plane.f_gradient.z, image);

    let fixed = single("rho2", Vec3::new(2.0 * d, 0.0, d), q);
    let three = lorentz_consistency_check(&charge, Some(&fixed), &plate, &settings()).unwrap();
    let consistent = (three.f_gradient - three.f_local).norm() / three.f_local.norm();
    let witness = (three.f_gradient_with_e23 - three.f_local).norm() / three.f_local.norm();
    outcome(
        agree < LORENTZ_TOL && image_err < LORENTZ_TOL && consistent < LORENTZ_TOL && witness > WITNESS_MIN,
        format!(
            "lorentz consistency: plane gradient vs local {agree:.3e}, vs image force {image_err:.3e} (tol {LORENTZ_TOL}); three-body gradient vs local {consistent:.3e}, with grad dE23 {witness:.3e} (needs > {WITNESS_MIN})"
        ),
    )
}

fn criterion_10() -> Outcome {
    let wire_spec = WireSpec {
        linear_charge_density: 1e-9,
        axis: Vec3::y(),
        center: Vec3::new(0.4, 0.0, 0.0),
        length: 20.0,
    };
    let wire = discretize_wire(&wire_spec, 2000).unwrap();
    let radius = 0.1;
    let tube = SurfaceMesh::closed_cylinder(Vec3::zeros(), Vec3::y(), radius, 1.0, 32, 32, 4).unwrap();
    let arm = tube_axis_arm(Vec3::zeros(), Vec3::y(), 0.5, 0.5, 9, 1e3, Vec3::z() * 9.274e-24, 0.02).unwrap();
    let r = verify_ac_tube_cancellation(&arm, &wire, &tube, &settings()).unwrap();
    outcome(
        r.residual < TUBE_TOL,
        format!(
            "AC tube screening, {} panels, {} samples: e_wire {:.4e} J, e_induced {:.4e} J, residual {:.3e} (tol {TUBE_TOL})",
            tube.len(),
            r.samples,
            r.e_wire,
            r.e_induced,
            r.residual
        ),
    )
}

fn criterion_11() -> Outcome {
    let s = settings();
    let mut notes = Vec::new();

    // linearity of potentials and of the BEM
    let a = ring("a", 0.2, 0.0, 32).merged_with_charge(1e-9);
    let x = Vec3::new(0.3, -0.1, 0.2);
    let u1 = scalar_potential(&a, x, &s).unwrap();
    let u3 = scalar_potential(&a.scaled(3.0), x, &s).unwrap();
    let cube = SurfaceMesh::cuboid(Vec3::new(0.0, 0.0, 2.0), Vec3::new(0.3, 0.3, 0.3), 3).unwrap();
    let bem1 = abphase::conductor::solve_induced_charge(&cube, &a, true, &s).unwrap();
    let bem3 = abphase::conductor::solve_induced_charge(&cube, &a.scaled(3.0), true, &s).unwrap();
    let linear = rel(u3, 3.0 * u1) < 1e-12 && rel(bem3.total_charge, 3.0 * bem1.total_charge) < 1e-9;
    notes.push(format!("linearity {linear}"));

    // sign flips
    let b = ring("b", 0.1, 0.3, 24);
    let e = interaction_energy(&a, &b, &s).unwrap();
    let flipped = interaction_energy(&a, &b.reversed_currents(), &s).unwrap();
    let arm = PathSpec::polyline(&[Vec3::new(-0.5, 0.1, 0.0), Vec3::new(0.0, 0.4, 0.1), Vec3::new(0.5, 0.1, 0.0)], 0.0, 1e-7, Carrier::Charge(ELEMENTARY_CHARGE)).unwrap();
    let forward = magnetic_ab_arm_phase(&arm, &b, &s).unwrap();
    let backward = magnetic_ab_arm_phase(&arm.reversed(), &b, &s).unwrap();
    let flips = flipped.current_part == -e.current_part && backward == -forward;
    notes.push(format!("sign flips {flips}"));

    // wavefunction normalization
    let n = 24;
    let h = 0.1e-6;
    let grid = WavefunctionGrid::from_fn(Vec3::zeros(), h, [n, n, n], -ELEMENTARY_CHARGE, ELECTRON_MASS, |p| {
        let c = Vec3::repeat(0.5 * h * (n - 1) as f64);
        let g = (-(p - c).norm_squared() / (2.0 * (0.4e-6f64).powi(2))).exp();
        Complex64::from_polar(g, 2e7 * p.x)
    })
    .unwrap()
    .normalized()
    .unwrap();
    let cloud = current_from_wavefunction(&grid).unwrap();
    let norm_err = rel(cloud.total_charge(), -ELEMENTARY_CHARGE);
    notes.push(format!("normalization {norm_err:.1e}"));

    // finite-difference force vs Coulomb
    let q1 = single("q1", Vec3::new(0.1, 0.2, -0.3), 2e-9);
    let q2 = single("q2", Vec3::new(0.7, -0.2, 0.1), -3e-9);
    let dh = 1e-6;
    let mut fd = Vec3::zeros();
    for k in 0..3 {
        let mut step = Vec3::zeros();
        step[k] = dh;
        let e = |o: Vec3| interaction_energy(&q1.translated(o), &q2, &s).unwrap().value;
        fd[k] = -(e(step) - e(-step)) / (2.0 * dh);
    }
    let sep = Vec3::new(0.1, 0.2, -0.3) - Vec3::new(0.7, -0.2, 0.1);
    let coulomb = sep * (PhysicalConstants::SI.coulomb() * 2e-9 * -3e-9 / sep.norm().powi(3));
    let fd_err = (fd - coulomb).norm() / coulomb.norm();
    notes.push(format!("FD force {fd_err:.1e}"));

    // closed circuits carry no net current moment
    let sol = discretize_solenoid(
        &SolenoidSpec { radius: 0.03, length: 0.4, turns: 300, current: 2.0, axis: Vec3::new(1.0, 1.0, 0.0).normalize(), center: Vec3::new(0.1, 0.0, 0.0) },
        30,
        24,
    )
    .unwrap();
    let defect = sol.net_moment_defect().max(ring("c", 0.4, 0.0, 17).net_moment_defect());
    notes.push(format!("net moment defect {defect:.1e}"));
    let clearance = nearest_distance(&b, x) > 0.0;

    outcome(
        linear && flips && norm_err < NORMALIZATION_TOL && fd_err < FD_FORCE_TOL && defect < 1e-12 && clearance,
        format!(
            "property checks: {} (normalization tol {NORMALIZATION_TOL:e}, FD tol {FD_FORCE_TOL:e}); randomized suites in tests/properties.rs",
            notes.join(", ")
        ),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
        ("11", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let o = run();
        println!("criterion {id:>2}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    let note = {
        let v = fourier_kernel_check(1.0, 500.0, 4001, 4001).unwrap();
        rel(v, 1.0 / (4.0 * PI))
    };
    println!("note: fourier identity at k_max=500 has truncation error {note:.3e}; its envelope 2/(pi k_max) falls below 1e-3 only past k_max = 637");
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
