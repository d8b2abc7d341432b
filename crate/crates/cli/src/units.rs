//! Unit-aware scalar quantities for scenario files.
//!
//! A quantity is written either as a bare number (already SI) or as a
//! string `"<number> <unit>"`, e.g. `"5 cm"`, `"-1 e"`, `"9.274e-24 A m^2"`.
//! Every quantity is stored and re-serialized in SI.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A physical dimension with its accepted unit spellings and SI factors.
pub trait Dimension {
    const NAME: &'static str;
    const SI: &'static str;
    const UNITS: &'static [(&'static str, f64)];
}

macro_rules! dimension {
    ($ty:ident, $name:literal, $si:literal, [$(($u:literal, $f:expr)),* $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub struct $ty;
        impl Dimension for $ty {
            const NAME: &'static str = $name;
            const SI: &'static str = $si;
            const UNITS: &'static [(&'static str, f64)] = &[$(($u, $f)),*];
        }
    };
}

const E: f64 = abphase::constants::ELEMENTARY_CHARGE;

dimension!(LengthDim, "length", "m", [("m", 1.0), ("km", 1e3), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)]);
dimension!(TimeDim, "time", "s", [("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9), ("ps", 1e-12), ("fs", 1e-15)]);
dimension!(CurrentDim, "current", "A", [("A", 1.0), ("kA", 1e3), ("mA", 1e-3), ("uA", 1e-6)]);
dimension!(ChargeDim, "charge", "C", [("C", 1.0), ("mC", 1e-3), ("uC", 1e-6), ("nC", 1e-9), ("pC", 1e-12), ("e", E)]);
dimension!(LineChargeDim, "linear charge density", "C/m", [("C/m", 1.0), ("uC/m", 1e-6), ("nC/m", 1e-9), ("pC/m", 1e-12), ("e/m", E)]);
dimension!(MomentDim, "magnetic moment", "A m^2", [("A m^2", 1.0), ("J/T", 1.0), ("mu_B", 9.274_010_078_3e-24), ("mu_N", 5.050_783_746_1e-27)]);
dimension!(VoltageDim, "voltage", "V", [("V", 1.0), ("kV", 1e3), ("mV", 1e-3), ("uV", 1e-6)]);
dimension!(SpeedDim, "speed", "m/s", [("m/s", 1.0), ("km/s", 1e3)]);
dimension!(AngleDim, "angle", "rad", [("rad", 1.0), ("deg", std::f64::consts::PI / 180.0)]);

/// An SI value of dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity<D> {
    pub si: f64,
    _dim: PhantomData<D>,
}

impl<D> Quantity<D> {
    pub const fn new(si: f64) -> Self {
        Self { si, _dim: PhantomData }
    }
}

impl<D> From<f64> for Quantity<D> {
    fn from(si: f64) -> Self {
        Self::new(si)
    }
}

pub type Length = Quantity<LengthDim>;
pub type Time = Quantity<TimeDim>;
pub type Current = Quantity<CurrentDim>;
pub type Charge = Quantity<ChargeDim>;
pub type LineCharge = Quantity<LineChargeDim>;
pub type Moment = Quantity<MomentDim>;
pub type Speed = Quantity<SpeedDim>;
pub type Angle = Quantity<AngleDim>;
pub type Voltage = Quantity<VoltageDim>;

/// Collapse runs of whitespace and the `*`/`·` product signs so that
/// `"A*m^2"` and `"A  m^2"` both read as `"A m^2"`.
fn canonical_unit(unit: &str) -> String {
    unit.replace(['*', '·'], " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parse `"<number> [unit]"` into SI for dimension `D`.
pub fn parse_quantity<D: Dimension>(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text.find(|c: char| c.is_whitespace()).unwrap_or(text.len());
    let (number, unit) = text.split_at(split);
    let value: f64 = number
        .parse()
        .map_err(|_| format!("`{text}` is not a {} (expected \"<number> <unit>\")", D::NAME))?;
    let unit = canonical_unit(unit);
    if unit.is_empty() {
        return Ok(value);
    }
    match D::UNITS.iter().find(|(u, _)| canonical_unit(u) == unit) {
        Some((_, f)) => Ok(value * f),
        None => {
            let known: Vec<&str> = D::UNITS.iter().map(|(u, _)| *u).collect();
            Err(format!(
                "unit mismatch: `{unit}` is not a unit of {} (accepted: {})",
                D::NAME,
                known.join(", ")
            ))
        }
    }
}

impl<D> Serialize for Quantity<D> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.si)
    }
}

struct QuantityVisitor<D>(PhantomData<D>);

impl<D: Dimension> Visitor<'_> for QuantityVisitor<D> {
    type Value = Quantity<D>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a {} in {} or a string \"<number> <unit>\"", D::NAME, D::SI)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        Ok(Quantity::new(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        parse_quantity::<D>(v).map(Quantity::new).map_err(E::custom)
    }
}

impl<'de, D: Dimension> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(d: De) -> Result<Self, De::Error> {
        d.deserialize_any(QuantityVisitor(PhantomData))
    }
}
