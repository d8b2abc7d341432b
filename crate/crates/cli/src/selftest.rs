//! Built-in oracle checks: the Fourier kernel identity plus a handful of
//! closed-form cases, each against a pinned tolerance.

use std::f64::consts::PI;

use abphase::constants::ELEMENTARY_CHARGE;
use abphase::conductor::solve_induced_charge;
use abphase::{
    ac_loop_difference, discretize_solenoid, discretize_wire, electric_ab_phase, fourier_kernel_check,
    interaction_energy, magnetic_ab_loop_difference, Carrier, CurrentElement, Distribution, PathSpec,
    PhysicalConstants, PotentialTimeline, QuadratureSettings, SolenoidSpec, SurfaceMesh, Vec3, WireSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(name: &'static str, measured: Result<f64, abphase::Error>, tolerance: f64) -> Check {
    let measured = measured.unwrap_or(f64::INFINITY);
    Check { name, measured, tolerance, passed: measured < tolerance }
}

fn point(label: &str, at: Vec3, q: f64) -> abphase::Result<Distribution> {
    Distribution::new(label, vec![CurrentElement::charge(at, q)])
}

fn ring(label: &str, radius: f64, z: f64, n: usize) -> abphase::Result<Distribution> {
    let p = |k: usize| {
        let t = 2.0 * PI * k as f64 / n as f64;
        Vec3::new(t.cos() * radius, t.sin() * radius, z)
    };
    Distribution::new(label, (0..n).map(|k| CurrentElement::current((p(k) + p(k + 1)) / 2.0, p(k + 1) - p(k))).collect())
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h)).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn semicircles(r: f64, c: Carrier) -> abphase::Result<(PathSpec, PathSpec)> {
    Ok((
        PathSpec::arc(Vec3::zeros(), Vec3::z(), r, PI, 2.0 * PI, 201, 0.0, 1e-7, c)?,
        PathSpec::arc(Vec3::zeros(), Vec3::z(), r, PI, 0.0, 201, 0.0, 1e-7, c)?,
    ))
}

/// Run every check. Takes a few seconds in release builds.
pub fn run_selftest() -> Vec<Check> {
    let s = QuadratureSettings::default();
    let k = PhysicalConstants::SI;
    let mut out = Vec::new();

    out.push(check(
        "fourier kernel identity (r = 1 m, k_max = 1000 /m)",
        fourier_kernel_check(1.0, 1000.0, 4001, 4001).map(|v| rel(v, 1.0 / (4.0 * PI))),
        1e-3,
    ));

    out.push(check(
        "coulomb energy of two unit charges 1 m apart",
        (|| {
            let e = interaction_energy(&point("a", Vec3::zeros(), 1.0)?, &point("b", Vec3::x(), 1.0)?, &s)?;
            Ok(rel(e.value, k.coulomb()))
        })(),
        1e-9,
    ));

    out.push(check(
        "coaxial loop mutual inductance (256 segments)",
        (|| {
            let (a, d) = (0.1, 0.05);
            let f = |phi: f64| phi.cos() / (2.0 * a * a + d * d - 2.0 * a * a * phi.cos()).sqrt();
            let m = k.mu0_over_4pi() * a * a * 4.0 * PI * simpson(f, 0.0, PI, 20_000);
            let e = interaction_energy(&ring("l1", a, 0.0, 256)?, &ring("l2", a, d, 256)?, &s)?;
            Ok(rel(-e.current_part, m))
        })(),
        5e-3,
    ));

    out.push(check(
        "magnetic AB phase vs q Phi / hbar (L = 20 loop radii)",
        (|| {
            let spec = SolenoidSpec { radius: 0.01, length: 1.0, turns: 2000, current: 0.5, axis: Vec3::z(), center: Vec3::zeros() };
            let source = discretize_solenoid(&spec, 400, 64)?;
            let (a1, a2) = semicircles(0.05, Carrier::Charge(ELEMENTARY_CHARGE))?;
            Ok(magnetic_ab_loop_difference(&a1, &a2, &source, Some(&spec), &s)?.relative_error.unwrap_or(f64::INFINITY))
        })(),
        1e-2,
    ));

    out.push(check(
        "electric AB phase vs qVT / hbar",
        (|| {
            let (v, t) = (2.5e-6, 3e-9);
            let u2 = PotentialTimeline::new(vec![(0.0, v), (t, v)])?;
            let u3 = PotentialTimeline::new(vec![(0.0, 0.0), (t, 0.0)])?;
            let r = electric_ab_phase(&u2, &u3, ELEMENTARY_CHARGE)?;
            Ok(rel(r.difference, ELEMENTARY_CHARGE * v * t / k.hbar))
        })(),
        1e-10,
    ));

    out.push(check(
        "AC phase vs mu0 mu lambda / hbar",
        (|| {
            let spec = WireSpec { linear_charge_density: 1e-9, axis: Vec3::z(), center: Vec3::zeros(), length: 5.0 };
            let wire = discretize_wire(&spec, 2000)?;
            let c = Carrier::MagneticMoment { moment: Vec3::z() * 9.274e-24, loop_edge: 1e-3 };
            let (a1, a2) = semicircles(0.05, c)?;
            Ok(ac_loop_difference(&a1, &a2, &wire, &spec, &s)?.relative_error.unwrap_or(f64::INFINITY))
        })(),
        2e-2,
    ));

    out.push(check(
        "grounded sphere induced charge vs -q a / d",
        (|| {
            let sphere = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 3)?;
            let sol = solve_induced_charge(&sphere, &point("q", Vec3::new(2.0, 0.0, 0.0), 1e-9)?, true, &s)?;
            Ok(rel(sol.total_charge, -0.5e-9))
        })(),
        1e-2,
    ));

    out
}
