//! Interferometric phases accumulated from the particle-source interaction
//! energy: magnetic and electric Aharonov-Bohm, and Aharonov-Casher.
//!
//! Every arm phase is `-(1/hbar) int dt Delta E_12`. For a charge carrier
//! `Delta E_12 = -q v . A_2`, so the phase is the line integral
//! `(q/hbar) int dl . A_2`, evaluated with the midpoint rule on the arm's
//! polyline segments.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kernel::{
    electric_field, interaction_energy, nearest_distance, vector_potential, QuadratureSettings,
};
use crate::sources::{
    carrier_elements, checked_unit, Carrier, Distribution, PathSegment, PathSpec, SolenoidSpec,
    WireSpec,
};
use crate::Vec3;

/// Arms closer than this share an endpoint.
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResult {
    /// rad, one per arm
    pub arm_phases: Vec<f64>,
    /// `arm_phases[1] - arm_phases[0]`, rad
    pub difference: f64,
    /// analytic value when the scenario has one, rad
    pub reference: Option<f64>,
    pub relative_error: Option<f64>,
}

impl PhaseResult {
    pub fn new(arm1: f64, arm2: f64) -> Self {
        Self {
            arm_phases: vec![arm1, arm2],
            difference: arm2 - arm1,
            reference: None,
            relative_error: None,
        }
    }

    /// Attach a reference value. The error is measured relative to `scale`,
    /// the magnitude of the effect when present, so a zero reference still
    /// gets a meaningful relative error.
    pub fn with_reference(mut self, reference: f64, scale: f64) -> Self {
        let deviation = (self.difference - reference).abs();
        let scale = scale.abs();
        self.reference = Some(reference);
        self.relative_error = Some(if scale > 0.0 {
            deviation / scale
        } else if deviation == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
        self
    }
}

/// Sampled effective potential of one tube, `U(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTimeline {
    samples: Vec<(f64, f64)>,
}

impl PotentialTimeline {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("samples", "a timeline needs at least 2 samples"));
        }
        if samples.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) {
            return Err(Error::invalid("samples", "non-finite sample"));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid("samples", "times must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Linear interpolation; `t` must lie within the timeline.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self
            .samples
            .partition_point(|s| s.0 <= t)
            .saturating_sub(1)
            .min(self.samples.len() - 2);
        let ((t0, u0), (t1, u1)) = (self.samples[k], self.samples[k + 1]);
        u0 + (u1 - u0) * (t - t0) / (t1 - t0)
    }
}

fn require_charge(arm: &PathSpec) -> Result<f64> {
    match arm.carrier() {
        Carrier::Charge(q) => Ok(q),
        _ => Err(Error::CarrierMismatch {
            expected: "charge carrier",
        }),
    }
}

fn require_moment(arm: &PathSpec) -> Result<Vec3> {
    match arm.carrier() {
        Carrier::MagneticMoment { moment, .. } => Ok(moment),
        _ => Err(Error::CarrierMismatch {
            expected: "magnetic-moment carrier",
        }),
    }
}

/// Ordered sum of per-segment contributions.
fn sum_segments(
    arm: &PathSpec,
    f: impl Fn(&PathSegment) -> Result<f64> + Sync + Send,
) -> Result<f64> {
    let segments: Vec<PathSegment> = arm.segments().collect();
    let parts: Vec<f64> = segments.par_iter().map(f).collect::<Result<_>>()?;
    Ok(antisymmetric_sum(parts))
}

/// Sums positive and negative parts separately, each in ascending
/// magnitude, so that negating every input negates the result bit for bit
/// regardless of input order (a reversed arm yields exactly minus the phase).
fn antisymmetric_sum(parts: Vec<f64>) -> f64 {
    let (mut pos, mut neg): (Vec<f64>, Vec<f64>) = parts.into_iter().partition(|&x| x > 0.0);
    neg.iter_mut().for_each(|x| *x = -*x);
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);
    pos.iter().sum::<f64>() - neg.iter().sum::<f64>()
}

/// `(q/hbar) int dl . A_source` along the arm.
pub fn magnetic_ab_arm_phase(
    arm: &PathSpec,
    source: &Distribution,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let q = require_charge(arm)?;
    source.require_nonempty()?;
    let line = sum_segments(arm, |seg| {
        Ok(seg.displacement.dot(&vector_potential(source, seg.midpoint, settings)?))
    })?;
    Ok(q / PhysicalConstants::SI.hbar * line)
}

/// Signed number of turns of a closed polyline about the line through
/// `axis_point` along `axis`, counter-clockwise about `axis` positive.
pub fn winding_number(points: &[Vec3], axis_point: Vec3, axis: Vec3) -> i64 {
    let axis = axis.normalize();
    let (e1, e2) = crate::sources::orthonormal_basis(axis);
    let angle = |p: &Vec3| {
        let d = p - axis_point;
        d.dot(&e2).atan2(d.dot(&e1))
    };
    let mut total = 0.0;
    let n = points.len();
    for k in 0..n {
        let a = angle(&points[k]);
        let b = angle(&points[(k + 1) % n]);
        let mut d = b - a;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    (total / (2.0 * PI)).round() as i64
}

/// The closed loop "arm2 forward, then arm1 backward".
fn closed_loop(arm1: &PathSpec, arm2: &PathSpec) -> Result<Vec<Vec3>> {
    let gap = (arm1.start() - arm2.start())
        .norm()
        .max((arm1.end() - arm2.end()).norm());
    if gap > ENDPOINT_TOLERANCE {
        return Err(Error::EndpointMismatch { gap });
    }
    let mut pts: Vec<Vec3> = arm2.samples().iter().map(|s| s.1).collect();
    pts.extend(arm1.samples().iter().rev().skip(1).map(|s| s.1));
    pts.pop();
    Ok(pts)
}

/// Phase difference between two arms around a current source.
///
/// When the source was built from `solenoid`, the reference is
/// `w q Phi_B / hbar` with `w` the winding number of the closed loop about the
/// solenoid axis; errors are relative to `|q Phi_B / hbar|`.
pub fn magnetic_ab_loop_difference(
    arm1: &PathSpec,
    arm2: &PathSpec,
    source: &Distribution,
    solenoid: Option<&SolenoidSpec>,
    settings: &QuadratureSettings,
) -> Result<PhaseResult> {
    let q = require_charge(arm1)?;
    require_charge(arm2)?;
    let loop_points = closed_loop(arm1, arm2)?;
    let p1 = magnetic_ab_arm_phase(arm1, source, settings)?;
    let p2 = magnetic_ab_arm_phase(arm2, source, settings)?;
    let result = PhaseResult::new(p1, p2);
    Ok(match solenoid {
        Some(spec) => {
            let axis = spec.validate()?;
            let w = winding_number(&loop_points, spec.center, axis);
            let scale = q * spec.ideal_flux() / PhysicalConstants::SI.hbar;
            result.with_reference(w as f64 * scale, scale)
        }
        None => result,
    })
}

/// `(q/hbar) int dt [U2(t) - U3(t)]` over the common interval.
///
/// Arm 1 passes through the tube at `u2`, arm 2 through the tube at `u3`,
/// so `arm_phases = [-(q/hbar) int U2, -(q/hbar) int U3]` and the difference
/// is the displayed total.
pub fn electric_ab_phase(
    u2: &PotentialTimeline,
    u3: &PotentialTimeline,
    q: f64,
) -> Result<PhaseResult> {
    let (start, end) = (u2.start().max(u3.start()), u2.end().min(u3.end()));
    if !(end > start) {
        return Err(Error::DisjointTimelines {
            a0: u2.start(),
            a1: u2.end(),
            b0: u3.start(),
            b1: u3.end(),
        });
    }
    // union of sample times inside the common interval: both integrands are
    // linear between consecutive nodes, so the trapezoid rule is exact
    let mut nodes: Vec<f64> = u2
        .samples()
        .iter()
        .chain(u3.samples())
        .map(|s| s.0)
        .filter(|&t| t > start && t < end)
        .collect();
    nodes.push(start);
    nodes.push(end);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup();

    let integrate = |u: &PotentialTimeline| -> f64 {
        nodes
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (u.value_at(w[0]) + u.value_at(w[1])))
            .sum()
    };
    let scale = q / PhysicalConstants::SI.hbar;
    Ok(PhaseResult::new(-scale * integrate(u2), -scale * integrate(u3)))
}

/// `(1/c^2) v . (E x mu)`, J.
pub fn ac_interaction_energy(v: Vec3, e_field: Vec3, moment: Vec3) -> Result<f64> {
    let c = PhysicalConstants::SI.c;
    if !(v.norm() < 0.1 * c) {
        return Err(Error::Relativistic {
            index: 0,
            speed: v.norm(),
        });
    }
    Ok(v.dot(&e_field.cross(&moment)) / (c * c))
}

fn check_clearance(
    arm: &PathSpec,
    source: &Distribution,
    settings: &QuadratureSettings,
) -> Result<()> {
    for (index, (_, p)) in arm.samples().iter().enumerate() {
        let distance = nearest_distance(source, *p);
        if distance == 0.0 || distance < settings.min_separation {
            return Err(Error::TooClose { index, distance });
        }
    }
    Ok(())
}

/// Per-arm Aharonov-Casher phase from the reduced dipole energy, with the
/// wire field taken as `-grad U` of the discretized line charge.
pub fn ac_arm_phase(
    arm: &PathSpec,
    wire: &Distribution,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let moment = require_moment(arm)?;
    wire.require_nonempty()?;
    check_clearance(arm, wire, settings)?;
    let hbar = PhysicalConstants::SI.hbar;
    let action = sum_segments(arm, |seg| {
        let e = electric_field(wire, seg.midpoint, settings)?;
        Ok(ac_interaction_energy(seg.velocity(), e, moment)? * seg.dt)
    })?;
    Ok(-action / hbar)
}

/// Per-arm phase from the full pairwise energy between the moving dipole's
/// element cloud (square loop plus its motional charge) and the wire.
pub fn ac_arm_phase_pairwise(
    arm: &PathSpec,
    wire: &Distribution,
    settings: &QuadratureSettings,
) -> Result<f64> {
    require_moment(arm)?;
    wire.require_nonempty()?;
    check_clearance(arm, wire, settings)?;
    let label = if wire.label() == "particle" { "dipole" } else { "particle" };
    let hbar = PhysicalConstants::SI.hbar;
    let action = sum_segments(arm, |seg| {
        let dipole = Distribution::new(
            label,
            carrier_elements(arm.carrier(), seg.midpoint, seg.velocity()),
        )?;
        Ok(interaction_energy(&dipole, wire, settings)?.value * seg.dt)
    })?;
    Ok(-action / hbar)
}

/// Aharonov-Casher phase difference around a line charge. The reference is
/// `w mu0 (mu . axis) lambda / hbar`; errors are relative to
/// `mu0 |mu| |lambda| / hbar`.
pub fn ac_loop_difference(
    arm1: &PathSpec,
    arm2: &PathSpec,
    wire: &Distribution,
    wire_spec: &WireSpec,
    settings: &QuadratureSettings,
) -> Result<PhaseResult> {
    let moment = require_moment(arm1)?;
    require_moment(arm2)?;
    let axis = checked_unit("axis", wire_spec.axis)?;
    let loop_points = closed_loop(arm1, arm2)?;
    let p1 = ac_arm_phase(arm1, wire, settings)?;
    let p2 = ac_arm_phase(arm2, wire, settings)?;
    let w = winding_number(&loop_points, wire_spec.center, axis);
    let k = PhysicalConstants::SI;
    let lambda = wire_spec.linear_charge_density;
    let reference = w as f64 * k.mu0 * moment.dot(&axis) * lambda / k.hbar;
    let scale = k.mu0 * moment.norm() * lambda / k.hbar;
    Ok(PhaseResult::new(p1, p2).with_reference(reference, scale))
}
