//! Effective potentials and the pairwise vacuum-energy interaction between
//! two element clouds, evaluated by direct summation of the `1/|r - r'|`
//! kernel.
//!
//! Energy convention: `interaction_energy(i, j)` is the full cross term
//! `sum_k sum_l [q_k q_l / eps0 - mu0 J_k . J_l] / (4 pi r_kl)`, counted once
//! per unordered pair of subsystems. For a point charge and the charge it
//! induces on a grounded conductor this is twice the electrostatic work
//! needed to assemble the configuration, which is why conductor tests
//! compare forces rather than energies.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::sources::{CurrentElement, Distribution};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SofteningMode {
    /// Drop pairs closer than `min_separation`.
    #[default]
    ExcludePair,
    /// Replace `r` by `sqrt(r^2 + min_separation^2)`.
    Plummer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub min_separation: f64,
    pub softening_mode: SofteningMode,
    /// Fixed-order reductions, bit-reproducible across thread counts.
    pub deterministic_reduction: bool,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            min_separation: 0.0,
            softening_mode: SofteningMode::ExcludePair,
            deterministic_reduction: true,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_separation >= 0.0) || !self.min_separation.is_finite() {
            return Err(Error::invalid("min_separation", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Regularized `1/r`, or `None` when the pair is excluded.
    #[inline]
    pub fn inverse_distance(&self, r: f64) -> Option<f64> {
        match self.softening_mode {
            SofteningMode::ExcludePair => {
                if r == 0.0 || r < self.min_separation {
                    None
                } else {
                    Some(1.0 / r)
                }
            }
            SofteningMode::Plummer => {
                let s = (r * r + self.min_separation * self.min_separation).sqrt();
                if s == 0.0 {
                    None
                } else {
                    Some(1.0 / s)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionEnergy {
    /// J
    pub value: f64,
    /// `rho rho / eps0` term, J
    pub charge_part: f64,
    /// `-mu0 J . J` term, J
    pub current_part: f64,
    pub pair_count_used: u64,
    pub pair_count_excluded: u64,
}

fn coincidence_error(dist: &Distribution, point: Vec3, settings: &QuadratureSettings) -> Result<()> {
    // Only an exact hit without any regularization is an error; otherwise the
    // pair is silently dropped.
    if settings.min_separation == 0.0 {
        if let Some(index) = dist.elements().iter().position(|e| e.position == point) {
            return Err(Error::CoincidentPoint {
                label: dist.label().to_string(),
                index,
                point: [point.x, point.y, point.z],
            });
        }
    }
    Ok(())
}

/// `sum_k q_k / (4 pi eps0 |point - r_k|)`, volts.
pub fn scalar_potential(
    dist: &Distribution,
    point: Vec3,
    settings: &QuadratureSettings,
) -> Result<f64> {
    dist.require_nonempty()?;
    coincidence_error(dist, point, settings)?;
    let k = PhysicalConstants::SI.coulomb();
    let sum: f64 = dist
        .elements()
        .iter()
        .filter_map(|e| {
            settings
                .inverse_distance((point - e.position).norm())
                .map(|inv| e.charge_weight * inv)
        })
        .sum();
    Ok(k * sum)
}

/// `sum_k mu0 J_k / (4 pi |point - r_k|)`, T m.
pub fn vector_potential(
    dist: &Distribution,
    point: Vec3,
    settings: &QuadratureSettings,
) -> Result<Vec3> {
    dist.require_nonempty()?;
    coincidence_error(dist, point, settings)?;
    Ok(vector_potential_unchecked(dist.elements(), point, settings))
}

pub(crate) fn vector_potential_unchecked(
    elements: &[CurrentElement],
    point: Vec3,
    settings: &QuadratureSettings,
) -> Vec3 {
    let k = PhysicalConstants::SI.mu0_over_4pi();
    let sum = elements.iter().fold(Vec3::zeros(), |acc, e| {
        match settings.inverse_distance((point - e.position).norm()) {
            Some(inv) => acc + e.current_moment * inv,
            None => acc,
        }
    });
    sum * k
}

/// Distance from `point` to the closest element of `dist`.
pub fn nearest_distance(dist: &Distribution, point: Vec3) -> f64 {
    dist.elements()
        .iter()
        .map(|e| (point - e.position).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Finite-difference step for derivatives of the potentials at `point`.
fn derivative_step(dist: &Distribution, point: Vec3) -> f64 {
    let d = nearest_distance(dist, point);
    if d.is_finite() && d > 0.0 {
        1e-4 * d
    } else {
        1e-9
    }
}

/// `E = -grad U` by central differences of [`scalar_potential`].
pub fn electric_field(
    dist: &Distribution,
    point: Vec3,
    settings: &QuadratureSettings,
) -> Result<Vec3> {
    dist.require_nonempty()?;
    let h = derivative_step(dist, point);
    let mut e = Vec3::zeros();
    for axis in 0..3 {
        let mut dp = Vec3::zeros();
        dp[axis] = h;
        let up = scalar_potential(dist, point + dp, settings)?;
        let dn = scalar_potential(dist, point - dp, settings)?;
        e[axis] = -(up - dn) / (2.0 * h);
    }
    Ok(e)
}

/// `B = curl A` by central differences of the vector potential of `elements`.
pub(crate) fn curl_of_vector_potential(
    elements: &[CurrentElement],
    point: Vec3,
    h: f64,
    settings: &QuadratureSettings,
) -> Vec3 {
    // jac[(i, j)] = d A_i / d x_j
    let mut jac = nalgebra::Matrix3::<f64>::zeros();
    for j in 0..3 {
        let mut dp = Vec3::zeros();
        dp[j] = h;
        let d = (vector_potential_unchecked(elements, point + dp, settings)
            - vector_potential_unchecked(elements, point - dp, settings))
            / (2.0 * h);
        jac.set_column(j, &d);
    }
    Vec3::new(
        jac[(2, 1)] - jac[(1, 2)],
        jac[(0, 2)] - jac[(2, 0)],
        jac[(1, 0)] - jac[(0, 1)],
    )
}

/// `B = curl A` by central differences of [`vector_potential`].
pub fn magnetic_field(
    dist: &Distribution,
    point: Vec3,
    settings: &QuadratureSettings,
) -> Result<Vec3> {
    dist.require_nonempty()?;
    coincidence_error(dist, point, settings)?;
    let h = derivative_step(dist, point);
    Ok(curl_of_vector_potential(dist.elements(), point, h, settings))
}

#[derive(Clone, Copy, Default)]
struct Partial {
    charge: f64,
    current: f64,
    used: u64,
    excluded: u64,
}

impl Partial {
    fn add(self, o: Partial) -> Partial {
        Partial {
            charge: self.charge + o.charge,
            current: self.current + o.current,
            used: self.used + o.used,
            excluded: self.excluded + o.excluded,
        }
    }
}

/// Vacuum-energy interaction `Delta E_ij` between two distinct subsystems.
///
/// The outer loop always runs over the distribution whose label sorts first,
/// so with `deterministic_reduction` the result is bit-identical under
/// argument swap.
pub fn interaction_energy(
    dist_i: &Distribution,
    dist_j: &Distribution,
    settings: &QuadratureSettings,
) -> Result<InteractionEnergy> {
    if dist_i.label() == dist_j.label() {
        return Err(Error::SelfEnergy(dist_i.label().to_string()));
    }
    dist_i.require_nonempty()?;
    dist_j.require_nonempty()?;
    settings.validate()?;

    let (outer, inner) = if dist_i.label() < dist_j.label() {
        (dist_i, dist_j)
    } else {
        (dist_j, dist_i)
    };
    let inner = inner.elements();

    let row = |a: &CurrentElement| -> Partial {
        let mut p = Partial::default();
        for b in inner {
            match settings.inverse_distance((a.position - b.position).norm()) {
                Some(inv) => {
                    p.charge += a.charge_weight * b.charge_weight * inv;
                    p.current += a.current_moment.dot(&b.current_moment) * inv;
                    p.used += 1;
                }
                None => p.excluded += 1,
            }
        }
        p
    };

    let total = if settings.deterministic_reduction {
        let rows: Vec<Partial> = outer.elements().par_iter().map(row).collect();
        rows.into_iter().fold(Partial::default(), Partial::add)
    } else {
        outer
            .elements()
            .par_iter()
            .map(row)
            .reduce(Partial::default, Partial::add)
    };

    let k = PhysicalConstants::SI;
    let charge_part = k.coulomb() * total.charge;
    let current_part = -k.mu0_over_4pi() * total.current;
    Ok(InteractionEnergy {
        value: charge_part + current_part,
        charge_part,
        current_part,
        pair_count_used: total.used,
        pair_count_excluded: total.excluded,
    })
}

/// Truncated numerical evaluation of `int d^3k exp(i k.r) / ((2 pi)^3 k^2)`
/// over `|k| < k_max`, to be compared with `1 / (4 pi r)`.
///
/// Both the radial and the polar (`u = cos theta`) integrals are done by
/// composite Simpson quadrature; the azimuthal integral is exact (`2 pi`).
/// The imaginary part vanishes by symmetry, so only `cos(k r u)` over
/// `u in [0, 1]` is integrated.
pub fn fourier_kernel_check(
    r: f64,
    k_max: f64,
    radial_points: usize,
    angular_points: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid("r", "must be positive"));
    }
    if !(k_max > 0.0) {
        return Err(Error::invalid("k_max", "must be positive"));
    }
    if radial_points < 3 || angular_points < 3 {
        return Err(Error::invalid("points", "need at least 3 quadrature points"));
    }
    let nr = radial_points | 1;
    let nu = angular_points | 1;
    let u_weights = simpson_weights(nu, 1.0);
    let k_weights = simpson_weights(nr, k_max);
    let du = 1.0 / (nu - 1) as f64;
    let dk = k_max / (nr - 1) as f64;

    // angular integral at each radial node: 2 * int_0^1 cos(k r u) du
    let radial: Vec<f64> = (0..nr)
        .into_par_iter()
        .map(|i| {
            let kr = i as f64 * dk * r;
            let s: f64 = u_weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * (kr * j as f64 * du).cos())
                .sum();
            2.0 * s
        })
        .collect();
    let integral: f64 = radial.iter().zip(&k_weights).map(|(f, w)| f * w).sum();
    // d^3k = k^2 dk dOmega; k^2 cancels the kernel's 1/k^2
    Ok(2.0 * PI * integral / (2.0 * PI).powi(3))
}

/// Composite Simpson weights on `n` (odd) equally spaced nodes over `[0, len]`.
fn simpson_weights(n: usize, len: f64) -> Vec<f64> {
    let h = len / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{discretize_wire, CurrentElement, WireSpec};
    use approx::assert_relative_eq;

    fn point(label: &str, at: Vec3, q: f64, j: Vec3) -> Distribution {
        Distribution::new(label, vec![CurrentElement::new(at, q, j)]).unwrap()
    }

    #[test]
    fn coulomb_potential_of_a_point_charge() {
        let d = point("a", Vec3::zeros(), 1e-9, Vec3::zeros());
        let u = scalar_potential(&d, Vec3::x(), &QuadratureSettings::default()).unwrap();
        assert_relative_eq!(u, 8.987_551_79, max_relative = 1e-8);
    }

    #[test]
    fn potentials_are_linear() {
        let s = QuadratureSettings::default();
        let a = CurrentElement::new(Vec3::new(0.1, 0.0, 0.0), 2e-9, Vec3::new(0.0, 1.0, 0.0));
        let b = CurrentElement::new(Vec3::new(-0.3, 0.2, 0.0), -1e-9, Vec3::new(1.0, 0.0, 0.5));
        let both = Distribution::new("ab", vec![a, b]).unwrap();
        let p = Vec3::new(0.4, 0.4, 0.4);
        let ua = scalar_potential(&Distribution::new("a", vec![a]).unwrap(), p, &s).unwrap();
        let ub = scalar_potential(&Distribution::new("b", vec![b]).unwrap(), p, &s).unwrap();
        assert_relative_eq!(scalar_potential(&both, p, &s).unwrap(), ua + ub, max_relative = 1e-15);

        let av = vector_potential(&both, p, &s).unwrap();
        let flipped = vector_potential(&both.reversed_currents(), p, &s).unwrap();
        assert_eq!(av, -flipped);
    }

    #[test]
    fn zero_current_gives_zero_vector_potential() {
        let d = point("a", Vec3::zeros(), 1.0, Vec3::zeros());
        assert_eq!(
            vector_potential(&d, Vec3::x(), &QuadratureSettings::default()).unwrap(),
            Vec3::zeros()
        );
    }

    #[test]
    fn coincident_evaluation_is_an_error_only_without_regularization() {
        let d = point("a", Vec3::zeros(), 1.0, Vec3::x());
        let s = QuadratureSettings::default();
        assert!(matches!(
            scalar_potential(&d, Vec3::zeros(), &s),
            Err(Error::CoincidentPoint { .. })
        ));
        let excl = QuadratureSettings {
            min_separation: 1e-3,
            ..s
        };
        assert_eq!(scalar_potential(&d, Vec3::zeros(), &excl).unwrap(), 0.0);
        let soft = QuadratureSettings {
            min_separation: 1e-3,
            softening_mode: SofteningMode::Plummer,
            ..s
        };
        let u = scalar_potential(&d, Vec3::zeros(), &soft).unwrap();
        assert_relative_eq!(u, PhysicalConstants::SI.coulomb() / 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn empty_distribution_is_rejected() {
        let e = Distribution::new("e", vec![]).unwrap();
        let s = QuadratureSettings::default();
        assert!(scalar_potential(&e, Vec3::x(), &s).is_err());
        let a = point("a", Vec3::zeros(), 1.0, Vec3::zeros());
        assert!(interaction_energy(&a, &e, &s).is_err());
    }

    #[test]
    fn two_point_charges() {
        let s = QuadratureSettings::default();
        let a = point("1", Vec3::zeros(), 1e-9, Vec3::zeros());
        let b = point("2", Vec3::x(), 1e-9, Vec3::zeros());
        let e = interaction_energy(&a, &b, &s).unwrap();
        assert_relative_eq!(e.charge_part, 8.987_551_79e-9, max_relative = 1e-8);
        assert_eq!(e.current_part, 0.0);
        assert_eq!(e.pair_count_used, 1);
        assert!(matches!(
            interaction_energy(&a, &a, &s),
            Err(Error::SelfEnergy(_))
        ));
    }

    #[test]
    fn coincident_pairs_are_counted_as_excluded() {
        let s = QuadratureSettings::default();
        let a = point("1", Vec3::zeros(), 1.0, Vec3::zeros());
        let b = Distribution::new(
            "2",
            vec![
                CurrentElement::charge(Vec3::zeros(), 1.0),
                CurrentElement::charge(Vec3::x(), 1.0),
            ],
        )
        .unwrap();
        let e = interaction_energy(&a, &b, &s).unwrap();
        assert_eq!((e.pair_count_used, e.pair_count_excluded), (1, 1));
    }

    #[test]
    fn energy_matches_charge_times_potential() {
        let s = QuadratureSettings::default();
        let a = Distribution::new(
            "a",
            (0..20)
                .map(|i| {
                    let t = i as f64 * 0.3;
                    CurrentElement::charge(Vec3::new(t.cos(), t.sin(), 0.1 * t), 1e-9 * (1.0 + t))
                })
                .collect(),
        )
        .unwrap();
        let b = Distribution::new(
            "b",
            (0..15)
                .map(|i| {
                    let t = i as f64 * 0.7;
                    CurrentElement::charge(Vec3::new(3.0 + t.sin(), t.cos(), -t), -2e-9 * t)
                })
                .collect(),
        )
        .unwrap();
        let e = interaction_energy(&a, &b, &s).unwrap();
        let via_potential: f64 = a
            .elements()
            .iter()
            .map(|el| el.charge_weight * scalar_potential(&b, el.position, &s).unwrap())
            .sum();
        assert_relative_eq!(e.charge_part, via_potential, max_relative = 1e-10);
    }

    #[test]
    fn finite_difference_force_matches_coulomb() {
        let s = QuadratureSettings::default();
        let (q1, q2, d) = (1e-9, -3e-9, 0.7);
        let fixed = point("2", Vec3::zeros(), q2, Vec3::zeros());
        let energy = |x: f64| {
            interaction_energy(&point("1", Vec3::new(x, 0.0, 0.0), q1, Vec3::zeros()), &fixed, &s)
                .unwrap()
                .value
        };
        let h = 1e-6 * d;
        let force = -(energy(d + h) - energy(d - h)) / (2.0 * h);
        let coulomb = PhysicalConstants::SI.coulomb() * q1 * q2 / (d * d);
        assert_relative_eq!(force, coulomb, max_relative = 1e-4);
    }

    #[test]
    fn electric_and_magnetic_fields_of_point_sources() {
        let s = QuadratureSettings::default();
        let q = 1e-9;
        let v = Vec3::new(0.0, 1e5, 0.0);
        let d = point("p", Vec3::zeros(), q, v * q);
        let at = Vec3::new(0.5, 0.0, 0.2);
        let r = at.norm();
        let e = electric_field(&d, at, &s).unwrap();
        let e_exact = at * (PhysicalConstants::SI.coulomb() * q / r.powi(3));
        assert_relative_eq!((e - e_exact).norm() / e_exact.norm(), 0.0, epsilon = 1e-7);
        let b = magnetic_field(&d, at, &s).unwrap();
        let b_exact = (v * q).cross(&at) * (PhysicalConstants::SI.mu0_over_4pi() / r.powi(3));
        assert_relative_eq!((b - b_exact).norm() / b_exact.norm(), 0.0, epsilon = 1e-7);
    }

    // Potential of a uniform segment of length L, charge density lambda, on its
    // perpendicular bisector at distance d: (lambda / 2 pi eps0) asinh(L / 2d).
    fn finite_line_potential(lambda: f64, length: f64, d: f64) -> f64 {
        2.0 * PhysicalConstants::SI.coulomb() * lambda * (length / (2.0 * d)).asinh()
    }

    #[test]
    fn discretized_wire_matches_finite_line_potential() {
        let spec = WireSpec {
            linear_charge_density: 1e-9,
            axis: Vec3::z(),
            center: Vec3::zeros(),
            length: 10.0,
        };
        let wire = discretize_wire(&spec, 2000).unwrap();
        let s = QuadratureSettings::default();
        for d in [0.05, 0.1, 0.5] {
            let u = scalar_potential(&wire, Vec3::new(d, 0.0, 0.0), &s).unwrap();
            let exact = finite_line_potential(1e-9, 10.0, d);
            assert_relative_eq!(u, exact, max_relative = 0.02);
            // long-wire asymptote (lambda / 2 pi eps0) ln(L / d)
            let asymptote = 2.0 * PhysicalConstants::SI.coulomb() * 1e-9 * (10.0 / d).ln();
            assert_relative_eq!(u, asymptote, max_relative = 0.02);
        }
    }

    #[test]
    fn fourier_kernel_scales_as_inverse_distance() {
        let a = fourier_kernel_check(1.0, 1000.0, 4001, 4001).unwrap();
        let b = fourier_kernel_check(2.0, 1000.0, 4001, 8001).unwrap();
        let exact = 1.0 / (4.0 * PI);
        assert_relative_eq!(a, exact, max_relative = 1e-3);
        // the truncation error of the r = 2 run equals that of r = 1 at k_max = 2000
        assert_relative_eq!(b, a / 2.0, max_relative = 1e-3);
        assert!(fourier_kernel_check(0.0, 10.0, 11, 11).is_err());
    }

    #[test]
    fn non_deterministic_reduction_agrees_to_rounding() {
        let mk = |label: &str, off: f64| {
            Distribution::new(
                label,
                (0..500)
                    .map(|i| {
                        let t = i as f64 * 0.01;
                        CurrentElement::new(
                            Vec3::new(t.cos() + off, t.sin(), t),
                            1e-12 * t.sin(),
                            Vec3::new(t, 1.0, -t),
                        )
                    })
                    .collect(),
            )
            .unwrap()
        };
        let (a, b) = (mk("a", 0.0), mk("b", 3.0));
        let det = interaction_energy(&a, &b, &QuadratureSettings::default()).unwrap();
        let par = interaction_energy(
            &a,
            &b,
            &QuadratureSettings {
                deterministic_reduction: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(det.value, par.value, max_relative = 1e-12);
    }
}
