//! Shielding experiments built on the conductor solvers.
//!
//! Subsystem labels: 1 is the particle, 2 the solenoid, wire or fixed charge,
//! 3 the induced charges and currents on the conductor.
//!
//! * [`verify_shield_cancellation`]: a shield around a solenoid responds to
//!   a passing charge so that `Delta E_23 = -Delta E_12`.
//! * [`shield_locality_phases`]: the same along a whole arm, comparing the
//!   particle's local phase with and without the shield.
//! * [`lorentz_consistency_check`]: the force on a charge near a grounded
//!   conductor from the local field versus the energy gradient.
//! * [`verify_ac_tube_cancellation`]: a moving magnetic moment inside a
//!   grounded tube no longer sees the line charge outside.

use rayon::prelude::*;

use super::charge::ChargeSolver;
use super::current::CurrentSolver;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kernel::{electric_field, interaction_energy, magnetic_field, QuadratureSettings};
use crate::mesh::SurfaceMesh;
use crate::phases::ac_interaction_energy;
use crate::sources::{
    carrier_elements, checked_unit, orthonormal_basis, Carrier, CurrentElement, Distribution,
    PathSpec, SolenoidSpec,
};
use crate::Vec3;

/// Default number of interior probes.
pub const DEFAULT_PROBE_COUNT: usize = 125;

const PARTICLE: &str = "particle";
const SOURCE: &str = "source";
const INDUCED: &str = "induced";

#[derive(Debug, Clone, PartialEq)]
pub struct ShieldReport {
    /// particle-solenoid, J
    pub delta_e12: f64,
    /// particle-induced, J
    pub delta_e13: f64,
    /// solenoid-induced, J
    pub delta_e23: f64,
    /// `|dE23 + dE12| / |dE12|`
    pub cancellation_residual: f64,
    /// max |B_total| / max |B_particle| at the fit probes
    pub residual_b: f64,
    /// `||B_induced + B_particle|| / ||B_particle||` (2-norm over held-out
    /// points between the probes)
    pub curl_residual: f64,
    pub underdetermined: bool,
}

/// `count` points filling the winding region of a solenoid: layers along
/// the axis, each a sunflower spiral out to 95% of the radius.
pub fn solenoid_probes(spec: &SolenoidSpec, count: usize) -> Result<Vec<Vec3>> {
    let axis = spec.validate()?;
    if count == 0 {
        return Err(Error::NoProbes);
    }
    let layers = ((count as f64).cbrt().round() as usize).clamp(1, count);
    let per_layer = count.div_ceil(layers);
    let (e1, e2) = orthonormal_basis(axis);
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let reach = 0.95 * spec.radius;
    let half = 0.45 * spec.length;
    let mut out = Vec::with_capacity(count);
    for layer in 0..layers {
        let z = if layers == 1 {
            0.0
        } else {
            -half + 2.0 * half * layer as f64 / (layers - 1) as f64
        };
        for k in 0..per_layer {
            if out.len() == count {
                break;
            }
            let r = reach * ((k as f64 + 0.5) / per_layer as f64).sqrt();
            let t = golden_angle * k as f64;
            out.push(spec.center + axis * z + (e1 * t.cos() + e2 * t.sin()) * r);
        }
    }
    Ok(out)
}

/// Closed cylinder with flat caps sized so panels are roughly square and
/// the total is close to `target_panels`.
pub fn canonical_shield(
    center: Vec3,
    axis: Vec3,
    radius: f64,
    length: f64,
    target_panels: usize,
) -> Result<SurfaceMesh> {
    if target_panels < 24 {
        return Err(Error::invalid("target_panels", "at least 24"));
    }
    let h = (2.0 * std::f64::consts::PI * radius * (length + 2.0 * radius) / target_panels as f64).sqrt();
    let n_around = ((2.0 * std::f64::consts::PI * radius / h).round() as usize).max(6);
    let n_along = ((length / h).round() as usize).max(1);
    let rings = ((radius / h).round() as usize).max(1);
    SurfaceMesh::closed_cylinder(center, axis, radius, length, n_around, n_along, rings)
}

/// Midpoints between each point and its nearest neighbour.
fn held_out(points: &[Vec3]) -> Vec<Vec3> {
    points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .min_by(|a, b| (a.1 - p).norm().total_cmp(&(b.1 - p).norm()))
                .map(|(_, q)| (p + q) / 2.0)
        })
        .collect()
}

/// Factored shield: reuse across particle positions.
#[derive(Debug)]
pub struct ShieldSolver {
    current: CurrentSolver,
    check_points: Vec<Vec3>,
}

impl ShieldSolver {
    pub fn new(mesh: &SurfaceMesh, probes: &[Vec3], settings: &QuadratureSettings) -> Result<Self> {
        let current = CurrentSolver::new(mesh, probes, settings)?;
        Ok(Self {
            current,
            check_points: held_out(probes),
        })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        self.current.mesh()
    }

    /// Condition estimate of the underlying charge system (a lower bound).
    pub fn condition_estimate(&self) -> f64 {
        self.current.charge_solver().condition_estimate()
    }

    /// Induced charges and currents on the floating neutral shield.
    pub fn induced(
        &self,
        particle: &Distribution,
        settings: &QuadratureSettings,
    ) -> Result<(Distribution, f64, bool)> {
        let currents = self.current.solve(particle, settings)?;
        let mut elements = currents.elements().to_vec();
        if particle.elements().iter().any(|e| e.charge_weight != 0.0) {
            let charges = self.current.charge_solver().solve(particle, settings)?;
            elements.extend(charges.to_distribution(self.mesh(), INDUCED)?.elements());
        }
        Ok((
            Distribution::new(INDUCED, elements)?,
            currents.residual_b,
            currents.underdetermined,
        ))
    }

    /// Shield response to one particle snapshot.
    pub fn evaluate(
        &self,
        particle: &Distribution,
        solenoid: &Distribution,
        settings: &QuadratureSettings,
    ) -> Result<ShieldReport> {
        particle.require_nonempty()?;
        solenoid.require_nonempty()?;
        let mesh = self.mesh();
        for e in particle.elements() {
            if mesh.contains(e.position) {
                return Err(Error::WrongSide {
                    point: e.position.into(),
                    where_: "inside the shield (particle)",
                    winding: mesh.winding_number(e.position),
                });
            }
        }
        for e in solenoid.elements() {
            if !mesh.contains(e.position) {
                return Err(Error::WrongSide {
                    point: e.position.into(),
                    where_: "outside the shield (solenoid)",
                    winding: mesh.winding_number(e.position),
                });
            }
        }
        let particle = particle.clone().with_label(PARTICLE);
        let solenoid = solenoid.clone().with_label(SOURCE);
        let (induced, residual_b, underdetermined) = self.induced(&particle, settings)?;

        let delta_e12 = interaction_energy(&particle, &solenoid, settings)?.value;
        let delta_e13 = interaction_energy(&particle, &induced, settings)?.value;
        let delta_e23 = interaction_energy(&solenoid, &induced, settings)?.value;
        let cancellation_residual = if delta_e12 != 0.0 {
            (delta_e23 + delta_e12).abs() / delta_e12.abs()
        } else {
            (delta_e23 + delta_e12).abs()
        };

        let currents_only = induced.currents_only();
        let mut num = 0.0;
        let mut den = 0.0;
        for &p in &self.check_points {
            let b1 = magnetic_field(&particle, p, settings)?;
            let b3 = magnetic_field(&currents_only, p, settings)?;
            num += (b1 + b3).norm_squared();
            den += b1.norm_squared();
        }
        let curl_residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
        Ok(ShieldReport {
            delta_e12,
            delta_e13,
            delta_e23,
            cancellation_residual,
            residual_b,
            curl_residual,
            underdetermined,
        })
    }
}

/// Solve the shield response to `particle` and compare the interaction
/// energies. Probes should fill the solenoid's winding region, see
/// [`solenoid_probes`].
pub fn verify_shield_cancellation(
    particle: &Distribution,
    solenoid: &Distribution,
    shield_mesh: &SurfaceMesh,
    probes: &[Vec3],
    settings: &QuadratureSettings,
) -> Result<ShieldReport> {
    ShieldSolver::new(shield_mesh, probes, settings)?.evaluate(particle, solenoid, settings)
}

/// Time-integrated phases along one arm, rad.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityPhases {
    /// `-int dE12 / hbar` with no shield present
    pub unshielded: f64,
    /// `-int dE12 / hbar` with the shield re-solved at every step
    pub shielded: f64,
    /// `-int (dE12 + dE13) / hbar`: everything local to the particle
    pub shielded_local: f64,
    /// `-int (dE12 + dE23) / hbar`
    pub with_e23: f64,
    /// `|shielded - unshielded| / |unshielded|`
    pub shift: f64,
    /// `|with_e23| / |unshielded|`
    pub collapse: f64,
    /// worst cancellation residual along the arm
    pub max_cancellation_residual: f64,
}

/// Move a charge along `arm`, re-solving the shield at each segment
/// midpoint, and integrate the interaction energies.
pub fn shield_locality_phases(
    arm: &PathSpec,
    solenoid: &Distribution,
    shield: &ShieldSolver,
    settings: &QuadratureSettings,
) -> Result<LocalityPhases> {
    let Carrier::Charge(_) = arm.carrier() else {
        return Err(Error::CarrierMismatch {
            expected: "charge carrier",
        });
    };
    let solenoid = solenoid.clone().with_label(SOURCE);
    let hbar = PhysicalConstants::SI.hbar;
    let (mut bare, mut e12, mut e13, mut e23) = (0.0, 0.0, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for seg in arm.segments() {
        let particle = Distribution::new(
            PARTICLE,
            carrier_elements(arm.carrier(), seg.midpoint, seg.velocity()),
        )?;
        bare += interaction_energy(&particle, &solenoid, settings)?.value * seg.dt;
        let r = shield.evaluate(&particle, &solenoid, settings)?;
        e12 += r.delta_e12 * seg.dt;
        e13 += r.delta_e13 * seg.dt;
        e23 += r.delta_e23 * seg.dt;
        worst = worst.max(r.cancellation_residual);
    }
    let unshielded = -bare / hbar;
    let shielded = -e12 / hbar;
    let with_e23 = -(e12 + e23) / hbar;
    Ok(LocalityPhases {
        unshielded,
        shielded,
        shielded_local: -(e12 + e13) / hbar,
        with_e23,
        shift: (shielded - unshielded).abs() / unshielded.abs(),
        collapse: with_e23.abs() / unshielded.abs(),
        max_cancellation_residual: worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzReport {
    /// `q1 E_total(r1)` from the potential of the fixed and induced charges, N
    pub f_local: Vec3,
    /// `-grad (dE12 + dE13)` with the induced charge held at its solved
    /// value, N
    pub f_gradient: Vec3,
    /// `f_gradient - grad dE23`, with `dE23` re-solved at each displaced
    /// position, N
    pub f_gradient_with_e23: Vec3,
    /// `-grad (dE12 + dE13)` with the induced charge re-solved at each
    /// displaced position, N. Twice the image force near a plane.
    pub f_gradient_resolved: Vec3,
}

/// Force on a point charge near a grounded conductor, with an optional
/// fixed charge distribution `fixed` (which may sit inside a closed
/// conductor).
///
/// Derivatives are central differences with a step of `1e-4` of the
/// distance from the charge to the nearest panel centroid.
pub fn lorentz_consistency_check(
    charge: &Distribution,
    fixed: Option<&Distribution>,
    conductor: &SurfaceMesh,
    settings: &QuadratureSettings,
) -> Result<LorentzReport> {
    let [element] = charge.elements() else {
        return Err(Error::invalid("charge", "must be a single element"));
    };
    let q1 = element.charge_weight;
    let r1 = element.position;
    if conductor.contains(r1) {
        return Err(Error::WrongSide {
            point: r1.into(),
            where_: "inside the conductor (charge)",
            winding: conductor.winding_number(r1),
        });
    }
    let fixed = match fixed {
        Some(f) if !f.is_empty() => Some(f.clone().with_label(SOURCE)),
        _ => None,
    };
    let solver = ChargeSolver::new(conductor, true)?;
    let at = |r: Vec3| Distribution::new(PARTICLE, vec![CurrentElement::charge(r, q1)]);
    let sources = |r: Vec3| -> Result<Distribution> {
        let p = at(r)?;
        Ok(match &fixed {
            Some(f) => Distribution::merged(SOURCE, [&p, f]),
            None => p,
        })
    };
    let solve = |r: Vec3| solver.solve_any_side(&sources(r)?, settings);

    let induced = solve(r1)?;
    let mut e_total = solver.induced_field(&induced, r1);
    if let Some(f) = &fixed {
        e_total += electric_field(f, r1, settings)?;
    }
    let f_local = e_total * q1;

    let frozen = induced.to_distribution_refined(conductor, INDUCED, 2)?;
    let e12 = |r: Vec3| -> Result<f64> {
        match &fixed {
            Some(f) => Ok(interaction_energy(&at(r)?, f, settings)?.value),
            None => Ok(0.0),
        }
    };
    let e13_frozen = |r: Vec3| -> Result<f64> { Ok(interaction_energy(&at(r)?, &frozen, settings)?.value) };
    let resolved = |r: Vec3| -> Result<(f64, f64)> {
        let s = solve(r)?.to_distribution_refined(conductor, INDUCED, 2)?;
        let e13 = interaction_energy(&at(r)?, &s, settings)?.value;
        let e23 = match &fixed {
            Some(f) => interaction_energy(f, &s, settings)?.value,
            None => 0.0,
        };
        Ok((e13, e23))
    };

    let h = 1e-4 * conductor.nearest_centroid_distance(r1);
    let mut f_gradient = Vec3::zeros();
    let mut grad_e23 = Vec3::zeros();
    let mut f_gradient_resolved = Vec3::zeros();
    for k in 0..3 {
        let mut d = Vec3::zeros();
        d[k] = h;
        let (plus, minus) = (r1 + d, r1 - d);
        let local = |r| -> Result<f64> { Ok(e12(r)? + e13_frozen(r)?) };
        f_gradient[k] = -(local(plus)? - local(minus)?) / (2.0 * h);
        let ((p13, p23), (m13, m23)) = (resolved(plus)?, resolved(minus)?);
        grad_e23[k] = (p23 - m23) / (2.0 * h);
        f_gradient_resolved[k] = -(e12(plus)? + p13 - e12(minus)? - m13) / (2.0 * h);
    }
    Ok(LorentzReport {
        f_local,
        f_gradient,
        f_gradient_with_e23: f_gradient - grad_e23,
        f_gradient_resolved,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcTubeReport {
    /// time-averaged dipole energy against the wire field, J
    pub e_wire: f64,
    /// time-averaged dipole energy against the induced-charge field, J
    pub e_induced: f64,
    /// `|int (e_wire + e_induced) dt| / |int e_wire dt|`
    pub residual: f64,
    /// number of arm segments solved
    pub samples: usize,
}

/// Carry a magnetic moment along an arm inside a grounded conducting tube
/// next to a line charge and compare the motional energies against the
/// wire field and against the tube's induced charge.
pub fn verify_ac_tube_cancellation(
    arm_inside_tube: &PathSpec,
    wire: &Distribution,
    tube_mesh: &SurfaceMesh,
    settings: &QuadratureSettings,
) -> Result<AcTubeReport> {
    let Carrier::MagneticMoment { moment, .. } = arm_inside_tube.carrier() else {
        return Err(Error::CarrierMismatch {
            expected: "magnetic-moment carrier",
        });
    };
    wire.require_nonempty()?;
    tube_mesh.validate_closed()?;
    for (_, p) in arm_inside_tube.samples() {
        if !tube_mesh.contains(*p) {
            return Err(Error::WrongSide {
                point: (*p).into(),
                where_: "outside the tube (arm)",
                winding: tube_mesh.winding_number(*p),
            });
        }
    }
    let solver = ChargeSolver::new(tube_mesh, true)?;
    let wire = wire.clone().with_label(SOURCE);
    solver.check_exterior(&wire)?;

    let segments: Vec<_> = arm_inside_tube.segments().collect();
    let parts = segments
        .par_iter()
        .map(|seg| -> Result<(f64, f64)> {
            let v = seg.velocity();
            let dipole = Distribution::new(
                PARTICLE,
                carrier_elements(arm_inside_tube.carrier(), seg.midpoint, v),
            )?;
            let induced = solver.solve_any_side(&Distribution::merged(SOURCE, [&wire, &dipole]), settings)?;
            let e_w = electric_field(&wire, seg.midpoint, settings)?;
            let e_i = solver.induced_field(&induced, seg.midpoint);
            Ok((
                ac_interaction_energy(v, e_w, moment)? * seg.dt,
                ac_interaction_energy(v, e_i, moment)? * seg.dt,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (w, i) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let duration = arm_inside_tube.end_time() - arm_inside_tube.start_time();
    let residual = if w != 0.0 { (w + i).abs() / w.abs() } else { (w + i).abs() };
    Ok(AcTubeReport {
        e_wire: w / duration,
        e_induced: i / duration,
        residual,
        samples: segments.len(),
    })
}

/// Straight arm along the axis of a tube, between `-reach` and `reach` of
/// the half length, carrying `moment` at constant speed.
pub fn tube_axis_arm(
    center: Vec3,
    axis: Vec3,
    half_length: f64,
    reach: f64,
    samples: usize,
    speed: f64,
    moment: Vec3,
    loop_edge: f64,
) -> Result<PathSpec> {
    let axis = checked_unit("axis", axis)?;
    if !(0.0..1.0).contains(&reach) || samples < 2 {
        return Err(Error::invalid("reach/samples", "need 0 <= reach < 1 and >= 2 samples"));
    }
    let span = 2.0 * reach * half_length;
    let points: Vec<Vec3> = (0..samples)
        .map(|k| center + axis * (-reach * half_length + span * k as f64 / (samples - 1) as f64))
        .collect();
    PathSpec::polyline(&points, 0.0, span / speed, Carrier::MagneticMoment { moment, loop_edge })
}
