//! Charge/current distributions represented as clouds of four-current
//! elements, plus the constructors for solenoids, line charges, sampled
//! wavefunctions and moving point carriers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::Vec3;

/// One discretization atom: `rho d^3r` and `J d^3r` located at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentElement {
    /// m
    pub position: Vec3,
    /// C
    pub charge_weight: f64,
    /// A m
    pub current_moment: Vec3,
}

impl CurrentElement {
    pub fn new(position: Vec3, charge_weight: f64, current_moment: Vec3) -> Self {
        Self {
            position,
            charge_weight,
            current_moment,
        }
    }

    pub fn charge(position: Vec3, charge_weight: f64) -> Self {
        Self::new(position, charge_weight, Vec3::zeros())
    }

    pub fn current(position: Vec3, current_moment: Vec3) -> Self {
        Self::new(position, 0.0, current_moment)
    }

    fn is_finite(&self) -> bool {
        self.position.iter().all(|x| x.is_finite())
            && self.charge_weight.is_finite()
            && self.current_moment.iter().all(|x| x.is_finite())
    }
}

/// A labelled subsystem: particle, solenoid, shield, wire, ...
///
/// Labels identify the subsystem index of the interaction energy; two
/// distributions with the same label are treated as the same subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    label: String,
    elements: Vec<CurrentElement>,
}

impl Distribution {
    pub fn new(label: impl Into<String>, elements: Vec<CurrentElement>) -> Result<Self> {
        if let Some(i) = elements.iter().position(|e| !e.is_finite()) {
            return Err(Error::invalid(
                "elements",
                format!("element {i} has a non-finite component"),
            ));
        }
        Ok(Self {
            label: label.into(),
            elements,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> &[CurrentElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.elements.is_empty() {
            Err(Error::EmptyDistribution(self.label.clone()))
        } else {
            Ok(())
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn total_charge(&self) -> f64 {
        self.elements.iter().map(|e| e.charge_weight).sum()
    }

    pub fn net_current_moment(&self) -> Vec3 {
        self.elements
            .iter()
            .fold(Vec3::zeros(), |acc, e| acc + e.current_moment)
    }

    /// `|sum m| / sum |m|`, zero for a current-free distribution.
    pub fn net_moment_defect(&self) -> f64 {
        let total: f64 = self.elements.iter().map(|e| e.current_moment.norm()).sum();
        if total == 0.0 {
            0.0
        } else {
            self.net_current_moment().norm() / total
        }
    }

    /// Multiply every charge weight and current moment by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        self.map_weights(|q, j| (q * s, j * s))
    }

    /// Same charges, every current moment negated.
    pub fn reversed_currents(&self) -> Self {
        self.map_weights(|q, j| (q, -j))
    }

    /// Same geometry with every charge weight replaced by zero.
    pub fn currents_only(&self) -> Self {
        self.map_weights(|_, j| (0.0, j))
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        Self {
            label: self.label.clone(),
            elements: self
                .elements
                .iter()
                .map(|e| CurrentElement {
                    position: e.position + offset,
                    ..*e
                })
                .collect(),
        }
    }

    /// Concatenate the elements of several distributions under a new label.
    pub fn merged<'a>(
        label: impl Into<String>,
        parts: impl IntoIterator<Item = &'a Distribution>,
    ) -> Self {
        let elements = parts
            .into_iter()
            .flat_map(|d| d.elements.iter().copied())
            .collect();
        Self {
            label: label.into(),
            elements,
        }
    }

    fn map_weights(&self, f: impl Fn(f64, Vec3) -> (f64, Vec3)) -> Self {
        Self {
            label: self.label.clone(),
            elements: self
                .elements
                .iter()
                .map(|e| {
                    let (q, j) = f(e.charge_weight, e.current_moment);
                    CurrentElement::new(e.position, q, j)
                })
                .collect(),
        }
    }
}

/// Returns the unit vector along `v`, accepting inputs within 1e-6 of unit
/// norm and rejecting anything else.
pub(crate) fn checked_unit(name: &'static str, v: Vec3) -> Result<Vec3> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(name, format!("expected a unit vector, got norm {n}")));
    }
    Ok(v / n)
}

/// Right-handed orthonormal pair `(e1, e2)` with `e1 x e2 = axis`.
///
/// For `axis = z` this is `(x, y)`, so azimuth angles measured in this basis
/// are the usual ones.
pub fn orthonormal_basis(axis: Vec3) -> (Vec3, Vec3) {
    let a = axis.normalize();
    let helper = if a.z.abs() > 0.9 {
        Vec3::x()
    } else {
        Vec3::z()
    };
    let e1 = (helper - a * helper.dot(&a)).normalize();
    let e2 = a.cross(&e1);
    (e1, e2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidSpec {
    /// m
    pub radius: f64,
    /// m
    pub length: f64,
    pub turns: u32,
    /// A
    pub current: f64,
    pub axis: Vec3,
    pub center: Vec3,
}

impl SolenoidSpec {
    pub fn validate(&self) -> Result<Vec3> {
        if !(self.radius > 0.0) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        if !(self.length > 0.0) {
            return Err(Error::invalid("length", "must be positive"));
        }
        if self.turns < 1 {
            return Err(Error::invalid("turns", "must be at least 1"));
        }
        if !self.current.is_finite() {
            return Err(Error::invalid("current", "must be finite"));
        }
        checked_unit("axis", self.axis)
    }

    /// Ideal interior flux `mu0 (N/L) I pi a^2`, in Wb.
    pub fn ideal_flux(&self) -> f64 {
        let mu0 = PhysicalConstants::SI.mu0;
        mu0 * (self.turns as f64 / self.length) * self.current * PI * self.radius * self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireSpec {
    /// C/m
    pub linear_charge_density: f64,
    pub axis: Vec3,
    pub center: Vec3,
    /// m
    pub length: f64,
}

impl WireSpec {
    pub fn validate(&self) -> Result<Vec3> {
        if !(self.length > 0.0) {
            return Err(Error::invalid("length", "must be positive"));
        }
        if !self.linear_charge_density.is_finite() {
            return Err(Error::invalid("linear_charge_density", "must be finite"));
        }
        checked_unit("axis", self.axis)
    }
}

/// Stack `loop_count` circular loops along the solenoid axis, each a closed
/// polygon of `segments_per_loop` straight current segments.
///
/// Loops sit at the centres of `loop_count` equal slices of
/// `[-length/2, length/2]`; each carries `current * turns / loop_count`, so the
/// surface current density matches the ideal winding. Positive current
/// circulates counter-clockwise about `axis` (field along `+axis`).
pub fn discretize_solenoid(
    spec: &SolenoidSpec,
    loop_count: usize,
    segments_per_loop: usize,
) -> Result<Distribution> {
    let axis = spec.validate()?;
    if loop_count < 1 {
        return Err(Error::invalid("loop_count", "must be at least 1"));
    }
    if segments_per_loop < 8 {
        return Err(Error::invalid("segments_per_loop", "must be at least 8"));
    }
    let (e1, e2) = orthonormal_basis(axis);
    let loop_current = spec.current * spec.turns as f64 / loop_count as f64;
    let ring: Vec<Vec3> = (0..=segments_per_loop)
        .map(|s| {
            let phi = 2.0 * PI * (s % segments_per_loop) as f64 / segments_per_loop as f64;
            (e1 * phi.cos() + e2 * phi.sin()) * spec.radius
        })
        .collect();

    let mut elements = Vec::with_capacity(loop_count * segments_per_loop);
    for k in 0..loop_count {
        let z = -0.5 * spec.length + (k as f64 + 0.5) * spec.length / loop_count as f64;
        let base = spec.center + axis * z;
        for s in 0..segments_per_loop {
            let (a, b) = (ring[s], ring[s + 1]);
            elements.push(CurrentElement::current(
                base + (a + b) * 0.5,
                (b - a) * loop_current,
            ));
        }
    }
    Distribution::new("solenoid", elements)
}

/// Uniform line charge as `element_count` equal point charges at the
/// centres of equal sub-intervals.
pub fn discretize_wire(spec: &WireSpec, element_count: usize) -> Result<Distribution> {
    let axis = spec.validate()?;
    if element_count < 2 {
        return Err(Error::invalid("element_count", "must be at least 2"));
    }
    let dl = spec.length / element_count as f64;
    let q = spec.linear_charge_density * dl;
    let elements = (0..element_count)
        .map(|k| {
            let s = -0.5 * spec.length + (k as f64 + 0.5) * dl;
            CurrentElement::charge(spec.center + axis * s, q)
        })
        .collect();
    Distribution::new("wire", elements)
}

/// A sampled scalar wavefunction on a uniform cubic grid (x index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub origin: Vec3,
    /// m
    pub spacing: f64,
    pub dims: [usize; 3],
    pub amplitudes: Vec<Complex64>,
    /// C
    pub particle_charge: f64,
    /// kg
    pub particle_mass: f64,
}

impl WavefunctionGrid {
    pub fn new(
        origin: Vec3,
        spacing: f64,
        dims: [usize; 3],
        amplitudes: Vec<Complex64>,
        particle_charge: f64,
        particle_mass: f64,
    ) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::invalid("dims", "every dimension needs at least 2 cells"));
        }
        let n = dims[0] * dims[1] * dims[2];
        if amplitudes.len() != n {
            return Err(Error::invalid(
                "amplitudes",
                format!("expected {n} values, got {}", amplitudes.len()),
            ));
        }
        if !(particle_mass > 0.0) {
            return Err(Error::invalid("particle_mass", "must be positive"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes", "non-finite amplitude"));
        }
        Ok(Self {
            origin,
            spacing,
            dims,
            amplitudes,
            particle_charge,
            particle_mass,
        })
    }

    /// Sample `f` at every cell centre `origin + spacing * (i, j, k)`.
    pub fn from_fn(
        origin: Vec3,
        spacing: f64,
        dims: [usize; 3],
        particle_charge: f64,
        particle_mass: f64,
        f: impl Fn(Vec3) -> Complex64,
    ) -> Result<Self> {
        let mut amplitudes = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    amplitudes.push(f(origin + Vec3::new(i as f64, j as f64, k as f64) * spacing));
                }
            }
        }
        Self::new(origin, spacing, dims, amplitudes, particle_charge, particle_mass)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn cell_position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.spacing
    }

    /// `sum |psi|^2 spacing^3`
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.spacing.powi(3)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::NotNormalized { norm: n });
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn conjugated(&self) -> Self {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a = a.conj());
        out
    }

    /// d psi / d axis at a cell; central difference inside, one-sided at faces.
    fn derivative(&self, idx: [usize; 3], axis: usize) -> Complex64 {
        let n = self.dims[axis];
        let at = |c: usize| {
            let mut p = idx;
            p[axis] = c;
            self.amplitudes[self.index(p[0], p[1], p[2])]
        };
        let c = idx[axis];
        let h = self.spacing;
        if c == 0 {
            (at(1) - at(0)) / h
        } else if c == n - 1 {
            (at(n - 1) - at(n - 2)) / h
        } else {
            (at(c + 1) - at(c - 1)) / (2.0 * h)
        }
    }
}

/// Per-cell charge `q |psi|^2 dV` and current `(q hbar / m) Im(psi* grad psi) dV`.
pub fn current_from_wavefunction(grid: &WavefunctionGrid) -> Result<Distribution> {
    let norm = grid.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { norm });
    }
    let dv = grid.spacing.powi(3);
    let hbar = PhysicalConstants::SI.hbar;
    let flux_scale = grid.particle_charge * hbar / grid.particle_mass * dv;
    let [nx, ny, nz] = grid.dims;
    let mut elements = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let psi = grid.amplitudes[grid.index(i, j, k)];
                let grad = [0, 1, 2].map(|ax| (psi.conj() * grid.derivative([i, j, k], ax)).im);
                elements.push(CurrentElement::new(
                    grid.cell_position(i, j, k),
                    grid.particle_charge * psi.norm_sqr() * dv,
                    Vec3::new(grad[0], grad[1], grad[2]) * flux_scale,
                ));
            }
        }
    }
    Distribution::new("particle", elements)
}

/// What an interferometer arm carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Carrier {
    /// Point charge, C.
    Charge(f64),
    /// Neutral particle with intrinsic moment (A m^2), realized as a square
    /// current loop of edge `loop_edge` (m).
    MagneticMoment { moment: Vec3, loop_edge: f64 },
}

/// A timed polyline for one interferometer arm.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    samples: Vec<(f64, Vec3)>,
    velocities: Vec<Vec3>,
    carrier: Carrier,
}

/// One straight piece of a path between consecutive samples.
#[derive(Debug, Clone, Copy)]
pub struct PathSegment {
    pub t_mid: f64,
    pub dt: f64,
    pub midpoint: Vec3,
    pub displacement: Vec3,
}

impl PathSegment {
    pub fn velocity(&self) -> Vec3 {
        self.displacement / self.dt
    }
}

impl PathSpec {
    pub fn new(samples: Vec<(f64, Vec3)>, carrier: Carrier) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("samples", "a path needs at least 2 samples"));
        }
        if samples.iter().any(|(t, p)| !t.is_finite() || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("samples", "non-finite sample"));
        }
        if let Some(w) = samples.windows(2).position(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::invalid(
                "samples",
                format!("times must be strictly increasing (sample {})", w + 1),
            ));
        }
        match carrier {
            Carrier::Charge(q) if !q.is_finite() => {
                return Err(Error::invalid("carrier", "charge must be finite"))
            }
            Carrier::MagneticMoment { moment, loop_edge } => {
                if !(moment.norm() > 0.0) || moment.iter().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("carrier", "magnetic moment must be nonzero"));
                }
                if !(loop_edge > 0.0) {
                    return Err(Error::invalid("loop_edge", "must be positive"));
                }
            }
            _ => {}
        }
        let velocities = finite_difference_velocities(&samples);
        let c = PhysicalConstants::SI.c;
        if let Some((index, v)) = velocities
            .iter()
            .enumerate()
            .find(|(_, v)| v.norm() >= 0.1 * c)
        {
            return Err(Error::Relativistic {
                index,
                speed: v.norm(),
            });
        }
        Ok(Self {
            samples,
            velocities,
            carrier,
        })
    }

    /// Constant-speed traversal of `points` starting at `t0` and lasting `duration`.
    pub fn polyline(points: &[Vec3], t0: f64, duration: f64, carrier: Carrier) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("points", "a path needs at least 2 points"));
        }
        if !(duration > 0.0) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + (w[1] - w[0]).norm());
        }
        let total = *cumulative.last().unwrap();
        if !(total > 0.0) {
            return Err(Error::invalid("points", "path has zero length"));
        }
        let samples = points
            .iter()
            .zip(&cumulative)
            .map(|(p, s)| (t0 + duration * s / total, *p))
            .collect();
        Self::new(samples, carrier)
    }

    /// Circular arc about `center` in the plane normal to `axis`, from
    /// `start_angle` to `end_angle` (radians, measured in
    /// [`orthonormal_basis`] of `axis`), sampled at `samples` points.
    #[allow(clippy::too_many_arguments)]
    pub fn arc(
        center: Vec3,
        axis: Vec3,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        samples: usize,
        t0: f64,
        duration: f64,
        carrier: Carrier,
    ) -> Result<Self> {
        let axis = checked_unit("axis", axis)?;
        if !(radius > 0.0) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        if samples < 2 {
            return Err(Error::invalid("samples", "a path needs at least 2 samples"));
        }
        if !(duration > 0.0) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        let (e1, e2) = orthonormal_basis(axis);
        let n = samples - 1;
        let pts: Vec<(f64, Vec3)> = (0..samples)
            .map(|k| {
                let f = k as f64 / n as f64;
                let phi = start_angle + (end_angle - start_angle) * f;
                (
                    t0 + duration * f,
                    center + (e1 * phi.cos() + e2 * phi.sin()) * radius,
                )
            })
            .collect();
        Self::new(pts, carrier)
    }

    pub fn samples(&self) -> &[(f64, Vec3)] {
        &self.samples
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn with_carrier(&self, carrier: Carrier) -> Result<Self> {
        Self::new(self.samples.clone(), carrier)
    }

    pub fn velocities(&self) -> &[Vec3] {
        &self.velocities
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn start(&self) -> Vec3 {
        self.samples[0].1
    }

    pub fn end(&self) -> Vec3 {
        self.samples[self.samples.len() - 1].1
    }

    /// The same geometric arm traversed end to start over the same time
    /// window, each segment keeping its duration (and so its speed).
    pub fn reversed(&self) -> Self {
        let (t0, t1) = (self.start_time(), self.end_time());
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|&(t, p)| (t0 + (t1 - t), p))
            .collect();
        Self::new(samples, self.carrier).expect("reversal preserves path invariants")
    }

    pub fn segments(&self) -> impl Iterator<Item = PathSegment> + '_ {
        self.samples.windows(2).map(|w| {
            let (t0, p0) = w[0];
            let (t1, p1) = w[1];
            PathSegment {
                t_mid: 0.5 * (t0 + t1),
                dt: t1 - t0,
                midpoint: (p0 + p1) * 0.5,
                displacement: p1 - p0,
            }
        })
    }

    /// Segment index and interpolation fraction for `time`.
    fn locate(&self, time: f64) -> Result<(usize, f64)> {
        let (start, end) = (self.start_time(), self.end_time());
        if !(time >= start && time <= end) {
            return Err(Error::TimeOutOfRange { time, start, end });
        }
        let upper = self.samples.partition_point(|s| s.0 <= time);
        let k = upper.saturating_sub(1).min(self.samples.len() - 2);
        let (t0, t1) = (self.samples[k].0, self.samples[k + 1].0);
        Ok((k, (time - t0) / (t1 - t0)))
    }

    pub fn position_at(&self, time: f64) -> Result<Vec3> {
        let (k, f) = self.locate(time)?;
        Ok(self.samples[k].1 * (1.0 - f) + self.samples[k + 1].1 * f)
    }

    pub fn velocity_at(&self, time: f64) -> Result<Vec3> {
        let (k, f) = self.locate(time)?;
        Ok(self.velocities[k] * (1.0 - f) + self.velocities[k + 1] * f)
    }
}

fn finite_difference_velocities(samples: &[(f64, Vec3)]) -> Vec<Vec3> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            let (a, b) = match k {
                0 => (0, 1),
                k if k == n - 1 => (n - 2, n - 1),
                k => (k - 1, k + 1),
            };
            (samples[b].1 - samples[a].1) / (samples[b].0 - samples[a].0)
        })
        .collect()
}

/// Elements of a carrier located at `position` moving with `velocity`.
pub fn carrier_elements(carrier: Carrier, position: Vec3, velocity: Vec3) -> Vec<CurrentElement> {
    match carrier {
        Carrier::Charge(q) => vec![CurrentElement::new(position, q, velocity * q)],
        Carrier::MagneticMoment { moment, loop_edge } => {
            let c2 = PhysicalConstants::SI.c.powi(2);
            let mu = moment.norm();
            let (e1, e2) = orthonormal_basis(moment / mu);
            let current = mu / (loop_edge * loop_edge);
            let h = 0.5 * loop_edge;
            // edge midpoints and the direction current flows along each edge,
            // counter-clockwise about the moment
            [(e1, e2), (e2, -e1), (-e1, -e2), (-e2, e1)]
                .into_iter()
                .map(|(offset, dir)| {
                    let m = dir * (current * loop_edge);
                    CurrentElement::new(position + offset * h, velocity.dot(&m) / c2, m)
                })
                .collect()
        }
    }
}

/// Snapshot of the arm's carrier at `time` as a distribution labelled `particle`.
///
/// A charge becomes one element with current moment `q v`. A magnetic moment
/// becomes a four-element square loop whose elements also carry the charge
/// `v . J d^3r / c^2` acquired by a moving magnetization.
pub fn moving_carrier_distribution(path: &PathSpec, time: f64) -> Result<Distribution> {
    let position = path.position_at(time)?;
    let velocity = path.velocity_at(time)?;
    Distribution::new("particle", carrier_elements(path.carrier, position, velocity))
}
