//! Scenario schema, parsing and validation.
//!
//! See `docs/scenario-format.md` for the full reference. Parsing is strict:
//! unknown keys are rejected with a nearest-key suggestion, every default is
//! filled in, and all quantities are normalized to SI so that
//! `parse -> to_toml -> parse` yields an equal config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::units::{Angle, Charge, Current, Length, LineCharge, Moment, Speed, Time};

/// Default number of interior probes for the shield current solve.
pub const DEFAULT_PROBES: usize = 125;
/// Default panel count of the generated cylinder shield.
pub const DEFAULT_SHIELD_PANELS: usize = 2000;
/// Default element count of a discretized wire.
pub const DEFAULT_WIRE_ELEMENTS: usize = 2000;
/// Default polygon segments per solenoid loop.
pub const DEFAULT_LOOP_SEGMENTS: usize = 64;
/// Default dipole loop edge as a fraction of the arm-to-wire distance.
pub const DIPOLE_EDGE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    MagneticAb,
    ElectricAb,
    ShieldedAb,
    Ac,
    AcTubes,
    LorentzCheck,
    CustomEnergy,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::MagneticAb => "magnetic_ab",
            Self::ElectricAb => "electric_ab",
            Self::ShieldedAb => "shielded_ab",
            Self::Ac => "ac",
            Self::AcTubes => "ac_tubes",
            Self::LorentzCheck => "lorentz_check",
            Self::CustomEnergy => "custom_energy",
        }
    }
}

fn zero3() -> [Length; 3] {
    [Length::new(0.0); 3]
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Free-form name, used for default output file names and CSV rows.
    #[serde(default = "default_name")]
    pub scenario: String,
    pub scenario_kind: ScenarioKind,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SourceSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arms: Vec<ArmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shield: Option<ShieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electric: Option<ElectricSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lorentz: Option<LorentzSpec>,
    /// Analytic reference for the primary result of a `custom_energy` run, J.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(default)]
    pub gates: Gates,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputSpec>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Softening {
    #[default]
    ExcludePair,
    Plummer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "zero_length")]
    pub min_separation: Length,
    #[serde(default)]
    pub softening: Softening,
    #[serde(default = "yes")]
    pub deterministic: bool,
}

fn zero_length() -> Length {
    Length::new(0.0)
}

fn yes() -> bool {
    true
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            min_separation: zero_length(),
            softening: Softening::default(),
            deterministic: true,
        }
    }
}

impl QuadratureConfig {
    pub fn settings(&self) -> abphase::QuadratureSettings {
        abphase::QuadratureSettings {
            min_separation: self.min_separation.si,
            softening_mode: match self.softening {
                Softening::ExcludePair => abphase::SofteningMode::ExcludePair,
                Softening::Plummer => abphase::SofteningMode::Plummer,
            },
            deterministic_reduction: self.deterministic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Solenoid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        radius: Length,
        length: Length,
        turns: u32,
        current: Current,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
        #[serde(default = "zero3")]
        center: [Length; 3],
        /// filled by validation: `clamp(ceil(2 length / radius), 20, 4000)`
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loops: Option<usize>,
        #[serde(default = "default_loop_segments")]
        segments: usize,
    },
    Wire {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        linear_charge_density: LineCharge,
        length: Length,
        #[serde(default = "z_axis")]
        axis: [f64; 3],
        #[serde(default = "zero3")]
        center: [Length; 3],
        #[serde(default = "default_wire_elements")]
        elements: usize,
    },
    PointCharge {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        charge: Charge,
        position: [Length; 3],
        /// m/s; the element carries current moment `q v`
        #[serde(default = "zero_velocity")]
        velocity: [Speed; 3],
    },
    WavefunctionGrid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        file: PathBuf,
    },
    ElementList {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        file: PathBuf,
    },
}

fn default_loop_segments() -> usize {
    DEFAULT_LOOP_SEGMENTS
}

fn default_wire_elements() -> usize {
    DEFAULT_WIRE_ELEMENTS
}

fn zero_velocity() -> [Speed; 3] {
    [Speed::new(0.0); 3]
}

impl SourceSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            Self::Solenoid { .. } => "solenoid",
            Self::Wire { .. } => "wire",
            Self::PointCharge { .. } => "point_charge",
            Self::WavefunctionGrid { .. } => "wavefunction_grid",
            Self::ElementList { .. } => "element_list",
        }
    }

    /// The configured label, else `<type>#<index>`.
    pub fn effective_label(&self, index: usize) -> String {
        self.label().map_or_else(|| format!("{}#{index}", self.type_name()), str::to_string)
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Self::Solenoid { label, .. }
            | Self::Wire { label, .. }
            | Self::PointCharge { label, .. }
            | Self::WavefunctionGrid { label, .. }
            | Self::ElementList { label, .. } => label.as_deref(),
        }
    }
}

/// What an arm carries. Exactly one of `charge` and `moment` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CarrierSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<Charge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment: Option<[Moment; 3]>,
    /// dipole loop edge; filled by validation when a wire is present
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_edge: Option<Length>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Arc {
        #[serde(default = "zero3")]
        center: [Length; 3],
        #[serde(default = "z_axis")]
        axis: [f64; 3],
        radius: Length,
        start_angle: Angle,
        end_angle: Angle,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "zero_time")]
        t0: Time,
        duration: Time,
        carrier: CarrierSpec,
    },
    Polyline {
        points: Vec<[Length; 3]>,
        /// straight sub-segments per leg
        #[serde(default = "default_subdivide")]
        subdivide: usize,
        #[serde(default = "zero_time")]
        t0: Time,
        duration: Time,
        carrier: CarrierSpec,
    },
    /// Straight run along a tube axis, for `ac_tubes`.
    TubeAxis {
        #[serde(default = "zero3")]
        center: [Length; 3],
        axis: [f64; 3],
        half_length: Length,
        #[serde(default = "default_reach")]
        reach: f64,
        #[serde(default = "default_tube_samples")]
        samples: usize,
        speed: Speed,
        carrier: CarrierSpec,
    },
}

fn default_samples() -> usize {
    201
}

fn default_subdivide() -> usize {
    100
}

fn default_reach() -> f64 {
    0.5
}

fn default_tube_samples() -> usize {
    9
}

fn zero_time() -> Time {
    Time::new(0.0)
}

impl ArmSpec {
    pub fn carrier(&self) -> &CarrierSpec {
        match self {
            Self::Arc { carrier, .. } | Self::Polyline { carrier, .. } | Self::TubeAxis { carrier, .. } => carrier,
        }
    }

    fn carrier_mut(&mut self) -> &mut CarrierSpec {
        match self {
            Self::Arc { carrier, .. } | Self::Polyline { carrier, .. } | Self::TubeAxis { carrier, .. } => carrier,
        }
    }

    /// First point of the arm, m.
    pub fn start_point(&self) -> [f64; 3] {
        match self {
            Self::Arc { center, axis, radius, start_angle, .. } => {
                let axis = abphase::Vec3::from(*axis).normalize();
                let (e1, e2) = abphase::sources::orthonormal_basis(axis);
                let c = si3(center);
                let p = abphase::Vec3::from(c)
                    + (e1 * start_angle.si.cos() + e2 * start_angle.si.sin()) * radius.si;
                p.into()
            }
            Self::Polyline { points, .. } => points.first().map(si3).unwrap_or([0.0; 3]),
            Self::TubeAxis { center, axis, half_length, reach, .. } => {
                let axis = abphase::Vec3::from(*axis).normalize();
                (abphase::Vec3::from(si3(center)) - axis * (reach * half_length.si)).into()
            }
        }
    }
}

pub fn si3<D>(v: &[crate::units::Quantity<D>; 3]) -> [f64; 3] {
    [v[0].si, v[1].si, v[2].si]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShieldSpec {
    #[serde(default = "default_probes")]
    pub probe_count: usize,
    pub mesh: MeshSpec,
}

fn default_probes() -> usize {
    DEFAULT_PROBES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    /// Canonical closed cylinder with end caps.
    Cylinder {
        #[serde(default = "zero3")]
        center: [Length; 3],
        #[serde(default = "z_axis")]
        axis: [f64; 3],
        radius: Length,
        length: Length,
        #[serde(default = "default_panels")]
        panels: usize,
    },
    /// Closed cylinder with explicit resolution.
    Tube {
        #[serde(default = "zero3")]
        center: [Length; 3],
        axis: [f64; 3],
        radius: Length,
        length: Length,
        n_around: usize,
        n_along: usize,
        #[serde(default = "default_cap_rings")]
        cap_rings: usize,
    },
    Cuboid {
        #[serde(default = "zero3")]
        center: [Length; 3],
        half_extents: [Length; 3],
        n: usize,
    },
    Icosphere {
        #[serde(default = "zero3")]
        center: [Length; 3],
        radius: Length,
        level: u32,
    },
    Plate {
        #[serde(default = "zero3")]
        center: [Length; 3],
        #[serde(default = "z_axis")]
        normal: [f64; 3],
        half_width: Length,
        n: usize,
        #[serde(default = "default_grading")]
        grading: f64,
    },
    File {
        path: PathBuf,
    },
}

fn default_panels() -> usize {
    DEFAULT_SHIELD_PANELS
}

fn default_cap_rings() -> usize {
    3
}

fn default_grading() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectricSpec {
    pub charge: Charge,
    /// `[time s, potential V]` samples of the tube-2 potential
    pub u2: Vec<[f64; 2]>,
    /// `[time s, potential V]` samples of the tube-3 potential
    pub u3: Vec<[f64; 2]>,
    /// analytic reference phase difference, rad
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzSpec {
    /// index into `sources` of the test charge; the rest form the fixed
    /// distribution
    #[serde(default)]
    pub charge_source: usize,
}

/// Tolerance gates. Validation fills in the defaults that apply to the
/// scenario kind; a run exits with code 2 if any gate fails.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cancellation_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curl_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locality_shift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tube_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lorentz_deviation: Option<f64>,
    /// minimum deviation once grad dE23 is included (a witness, not a bound)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_min: Option<f64>,
    /// turn every gate off
    #[serde(default, skip_serializing_if = "is_false")]
    pub disabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Phase,
    Energy,
    Report,
    Csv,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Phase => "phase",
            Self::Energy => "energy",
            Self::Report => "report",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub kind: OutputKind,
    /// relative paths resolve against the output directory
    pub path: PathBuf,
}

/// A configuration problem: bad syntax, missing field, unknown key or
/// inconsistent values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

/// Words in backticks, in order of appearance.
fn backticked(message: &str) -> Vec<&str> {
    message.split('`').skip(1).step_by(2).collect()
}

/// Names that are not keys of any one table but that users type as if
/// they were: the tagged variants, with where they belong.
const SCHEMA_WORDS: &[(&str, &str)] = &[
    ("solenoid", "a `type` of [[sources]]"),
    ("wire", "a `type` of [[sources]]"),
    ("point_charge", "a `type` of [[sources]]"),
    ("wavefunction_grid", "a `type` of [[sources]]"),
    ("element_list", "a `type` of [[sources]]"),
    ("arc", "a `shape` of [[arms]]"),
    ("polyline", "a `shape` of [[arms]]"),
    ("tube_axis", "a `shape` of [[arms]]"),
    ("cylinder", "a `generator` of [shield.mesh]"),
    ("tube", "a `generator` of [shield.mesh]"),
    ("cuboid", "a `generator` of [shield.mesh]"),
    ("icosphere", "a `generator` of [shield.mesh]"),
    ("plate", "a `generator` of [shield.mesh]"),
    ("carrier", "a table of [[arms]]"),
    ("mesh", "a table of [shield]"),
];

fn close_enough(bad: &str, distance: usize) -> bool {
    distance <= (bad.len() / 3).max(2)
}

/// For serde's "unknown field/variant `x`, expected ..." messages, a hint
/// naming the closest accepted spelling: first among the keys valid at
/// that spot, then among the schema's variant and table names.
pub fn suggestion(message: &str) -> Option<String> {
    if !(message.contains("unknown field") || message.contains("unknown variant")) {
        return None;
    }
    let words = backticked(message);
    let (bad, candidates) = words.split_first()?;
    let local = candidates.iter().map(|c| (strsim::damerau_levenshtein(bad, c), *c)).min();
    if let Some((_, c)) = local.filter(|(d, _)| close_enough(bad, *d)) {
        return Some(format!("did you mean `{c}`?"));
    }
    SCHEMA_WORDS
        .iter()
        .map(|(w, place)| (strsim::damerau_levenshtein(bad, w), *w, *place))
        .filter(|(d, _, _)| close_enough(bad, *d))
        .min()
        .map(|(_, w, place)| format!("did you mean `{w}` ({place})?"))
}

fn toml_error(e: toml::de::Error, text: &str) -> ConfigError {
    let mut message = e.message().to_string();
    if let Some(hint) = suggestion(&message) {
        message.push_str("; ");
        message.push_str(&hint);
    }
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            ConfigError::new(format!("line {line}, column {column}: {message}"))
        }
        None => ConfigError::new(message),
    }
}

/// Parse and validate a scenario. `base_dir` anchors relative file
/// references, which must exist.
pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
    let mut config: ScenarioConfig = toml::from_str(text).map_err(|e| toml_error(e, text))?;
    config.validate(base_dir)?;
    Ok(config)
}

/// Read and parse a scenario file.
pub fn load_scenario(path: &Path) -> Result<(ScenarioConfig, String), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok((parse_scenario(&text, base)?, text))
}

fn missing(kind: ScenarioKind, what: &str) -> ConfigError {
    ConfigError::new(format!("scenario_kind = \"{}\" requires {what}", kind.name()))
}

fn check_axis(name: &str, v: [f64; 3]) -> Result<(), ConfigError> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(ConfigError::new(format!("`{name}` must be a nonzero finite vector")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(ConfigError::new(format!("`{name}` must be positive, got {v}")));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Serialize back to TOML (SI numbers, every default explicit).
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    fn count(&self, type_name: &str) -> usize {
        self.sources.iter().filter(|s| s.type_name() == type_name).count()
    }

    /// Check kind-specific requirements and fill in derived defaults.
    pub fn validate(&mut self, base_dir: &Path) -> Result<(), ConfigError> {
        let kind = self.scenario_kind;
        if !(self.quadrature.min_separation.si >= 0.0) || !self.quadrature.min_separation.si.is_finite() {
            return Err(ConfigError::new("`quadrature.min_separation` must be >= 0"));
        }
        let mut labels = std::collections::HashSet::new();
        for (i, s) in self.sources.iter_mut().enumerate() {
            validate_source(i, s, base_dir)?;
            let label = s.effective_label(i);
            if !labels.insert(label.clone()) {
                return Err(ConfigError::new(format!("sources[{i}]: label `{label}` is already used")));
            }
        }
        if let Some(shield) = &self.shield {
            if shield.probe_count == 0 {
                return Err(ConfigError::new("`shield.probe_count` must be at least 1"));
            }
            if let MeshSpec::File { path } = &shield.mesh {
                require_file("shield.mesh.path", path, base_dir)?;
            }
        }
        let arm_kind = |arms: &[ArmSpec], charge: bool| -> Result<(), ConfigError> {
            for (i, a) in arms.iter().enumerate() {
                let c = a.carrier();
                let ok = if charge { c.charge.is_some() && c.moment.is_none() } else { c.moment.is_some() && c.charge.is_none() };
                if !ok {
                    let want = if charge { "`carrier.charge`" } else { "`carrier.moment`" };
                    return Err(ConfigError::new(format!(
                        "arms[{i}]: scenario_kind = \"{}\" needs exactly {want}",
                        kind.name()
                    )));
                }
            }
            Ok(())
        };
        match kind {
            ScenarioKind::MagneticAb => {
                if self.count("solenoid") != 1 || self.sources.len() != 1 {
                    return Err(missing(kind, "exactly one source, of type \"solenoid\""));
                }
                if self.arms.len() != 2 {
                    return Err(missing(kind, "two `[[arms]]` entries"));
                }
                arm_kind(&self.arms, true)?;
            }
            ScenarioKind::ElectricAb => {
                let Some(e) = &self.electric else {
                    return Err(missing(kind, "the `[electric]` block (missing field `electric`)"));
                };
                for (name, tl) in [("u2", &e.u2), ("u3", &e.u3)] {
                    if tl.len() < 2 || tl.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                        return Err(ConfigError::new(format!(
                            "`electric.{name}` needs at least 2 samples with strictly increasing times"
                        )));
                    }
                }
            }
            ScenarioKind::ShieldedAb => {
                if self.shield.is_none() {
                    return Err(missing(kind, "a `[shield]` block (missing field `shield`)"));
                }
                if self.count("solenoid") != 1 || self.sources.len() != 1 {
                    return Err(missing(kind, "exactly one source, of type \"solenoid\""));
                }
                if self.arms.len() != 1 {
                    return Err(missing(kind, "one `[[arms]]` entry"));
                }
                arm_kind(&self.arms, true)?;
            }
            ScenarioKind::Ac => {
                if self.count("wire") != 1 || self.sources.len() != 1 {
                    return Err(missing(kind, "exactly one source, of type \"wire\""));
                }
                if self.arms.len() != 2 {
                    return Err(missing(kind, "two `[[arms]]` entries"));
                }
                arm_kind(&self.arms, false)?;
            }
            ScenarioKind::AcTubes => {
                if self.shield.is_none() {
                    return Err(missing(kind, "a `[shield]` block (missing field `shield`) describing the tube"));
                }
                if self.count("wire") != 1 || self.sources.len() != 1 {
                    return Err(missing(kind, "exactly one source, of type \"wire\""));
                }
                if self.arms.len() != 1 {
                    return Err(missing(kind, "one `[[arms]]` entry"));
                }
                arm_kind(&self.arms, false)?;
            }
            ScenarioKind::LorentzCheck => {
                if self.shield.is_none() {
                    return Err(missing(kind, "a `[shield]` block (missing field `shield`) describing the conductor"));
                }
                let index = self.lorentz.get_or_insert(LorentzSpec { charge_source: 0 }).charge_source;
                match self.sources.get(index) {
                    Some(SourceSpec::PointCharge { .. }) => {}
                    _ => {
                        return Err(ConfigError::new(format!(
                            "`lorentz.charge_source` = {index} must index a point_charge source"
                        )))
                    }
                }
            }
            ScenarioKind::CustomEnergy => {
                if self.sources.len() < 2 {
                    return Err(missing(kind, "at least two `[[sources]]` entries"));
                }
            }
        }
        if kind != ScenarioKind::CustomEnergy && self.reference.is_some() {
            return Err(ConfigError::new("top-level `reference` only applies to custom_energy"));
        }
        for (i, a) in self.arms.iter().enumerate() {
            validate_arm(i, a)?;
        }
        self.fill_dipole_edges()?;
        self.fill_gates();
        self.fill_outputs();
        Ok(())
    }

    fn fill_dipole_edges(&mut self) -> Result<(), ConfigError> {
        let wire = self.sources.iter().find_map(|s| match s {
            SourceSpec::Wire { axis, center, .. } => Some((*axis, si3(center))),
            _ => None,
        });
        for (i, arm) in self.arms.iter_mut().enumerate() {
            let start = arm.start_point();
            let c = arm.carrier_mut();
            if c.moment.is_none() {
                if c.loop_edge.is_some() {
                    return Err(ConfigError::new(format!("arms[{i}]: `loop_edge` needs `moment`")));
                }
                continue;
            }
            let m = c.moment.expect("checked above");
            if !si3(&m).iter().any(|x| *x != 0.0) || !si3(&m).iter().all(|x| x.is_finite()) {
                return Err(ConfigError::new(format!("arms[{i}]: `carrier.moment` must be nonzero and finite")));
            }
            if let Some(edge) = c.loop_edge {
                check_positive(&format!("arms[{i}].carrier.loop_edge"), edge.si)?;
                continue;
            }
            let Some((axis, center)) = wire else {
                return Err(ConfigError::new(format!(
                    "arms[{i}]: `carrier.loop_edge` is required when there is no wire to scale it from"
                )));
            };
            let a = abphase::Vec3::from(axis).normalize();
            let d = abphase::Vec3::from(start) - abphase::Vec3::from(center);
            let distance = (d - a * d.dot(&a)).norm();
            check_positive(&format!("arms[{i}] distance to the wire"), distance)?;
            c.loop_edge = Some(Length::new(DIPOLE_EDGE_FRACTION * distance));
        }
        Ok(())
    }

    fn fill_gates(&mut self) {
        let g = &mut self.gates;
        if g.disabled {
            return;
        }
        match self.scenario_kind {
            ScenarioKind::MagneticAb => {
                g.relative_error.get_or_insert(0.01);
            }
            ScenarioKind::Ac => {
                g.relative_error.get_or_insert(0.02);
            }
            ScenarioKind::ElectricAb => {
                if self.electric.as_ref().is_some_and(|e| e.reference.is_some()) {
                    g.relative_error.get_or_insert(1e-10);
                }
            }
            ScenarioKind::ShieldedAb => {
                g.cancellation_residual.get_or_insert(0.05);
                g.curl_residual.get_or_insert(0.05);
                g.locality_shift.get_or_insert(0.005);
            }
            ScenarioKind::AcTubes => {
                g.tube_residual.get_or_insert(0.05);
            }
            ScenarioKind::LorentzCheck => {
                g.lorentz_deviation.get_or_insert(0.02);
            }
            ScenarioKind::CustomEnergy => {
                if self.reference.is_some() {
                    g.relative_error.get_or_insert(0.01);
                }
            }
        }
    }

    /// Default outputs: a report and a CSV named after the scenario.
    fn fill_outputs(&mut self) {
        if !self.outputs.is_empty() {
            return;
        }
        let stem = self.file_stem();
        self.outputs = vec![
            OutputSpec { kind: OutputKind::Report, path: format!("{stem}.report.txt").into() },
            OutputSpec { kind: OutputKind::Csv, path: format!("{stem}.csv").into() },
        ];
    }

    /// Scenario name reduced to `[A-Za-z0-9_-]`.
    pub fn file_stem(&self) -> String {
        let s: String = self
            .scenario
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        if s.is_empty() { "scenario".into() } else { s }
    }
}

fn require_file(name: &str, path: &Path, base_dir: &Path) -> Result<(), ConfigError> {
    let full = base_dir.join(path);
    if !full.is_file() {
        return Err(ConfigError::new(format!("`{name}`: file {} does not exist", full.display())));
    }
    Ok(())
}

fn validate_source(i: usize, s: &mut SourceSpec, base_dir: &Path) -> Result<(), ConfigError> {
    let at = |f: &str| format!("sources[{i}].{f}");
    match s {
        SourceSpec::Solenoid { radius, length, turns, axis, loops, segments, .. } => {
            check_positive(&at("radius"), radius.si)?;
            check_positive(&at("length"), length.si)?;
            check_axis(&at("axis"), *axis)?;
            if *turns == 0 {
                return Err(ConfigError::new(format!("`{}` must be at least 1", at("turns"))));
            }
            if *segments < 8 {
                return Err(ConfigError::new(format!("`{}` must be at least 8", at("segments"))));
            }
            let n = loops.get_or_insert(((2.0 * length.si / radius.si).ceil() as usize).clamp(20, 4000));
            if *n == 0 {
                return Err(ConfigError::new(format!("`{}` must be at least 1", at("loops"))));
            }
        }
        SourceSpec::Wire { length, axis, elements, .. } => {
            check_positive(&at("length"), length.si)?;
            check_axis(&at("axis"), *axis)?;
            if *elements < 2 {
                return Err(ConfigError::new(format!("`{}` must be at least 2", at("elements"))));
            }
        }
        SourceSpec::PointCharge { .. } => {}
        SourceSpec::WavefunctionGrid { file, .. } | SourceSpec::ElementList { file, .. } => {
            require_file(&at("file"), file, base_dir)?;
        }
    }
    Ok(())
}

fn validate_arm(i: usize, a: &ArmSpec) -> Result<(), ConfigError> {
    let at = |f: &str| format!("arms[{i}].{f}");
    match a {
        ArmSpec::Arc { axis, radius, samples, duration, .. } => {
            check_axis(&at("axis"), *axis)?;
            check_positive(&at("radius"), radius.si)?;
            check_positive(&at("duration"), duration.si)?;
            if *samples < 2 {
                return Err(ConfigError::new(format!("`{}` must be at least 2", at("samples"))));
            }
        }
        ArmSpec::Polyline { points, subdivide, duration, .. } => {
            check_positive(&at("duration"), duration.si)?;
            if points.len() < 2 {
                return Err(ConfigError::new(format!("`{}` needs at least 2 points", at("points"))));
            }
            if *subdivide == 0 {
                return Err(ConfigError::new(format!("`{}` must be at least 1", at("subdivide"))));
            }
        }
        ArmSpec::TubeAxis { axis, half_length, reach, samples, speed, .. } => {
            check_axis(&at("axis"), *axis)?;
            check_positive(&at("half_length"), half_length.si)?;
            check_positive(&at("speed"), speed.si)?;
            if !(*reach > 0.0 && *reach < 1.0) {
                return Err(ConfigError::new(format!("`{}` must lie in (0, 1)", at("reach"))));
            }
            if *samples < 2 {
                return Err(ConfigError::new(format!("`{}` must be at least 2", at("samples"))));
            }
        }
    }
    Ok(())
}
