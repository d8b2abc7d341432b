//! Parameter sweeps: one run per value of a numeric config entry.
//!
//! The sweep edits the scenario *as written* (before defaults are filled),
//! so derived defaults such as the solenoid loop count follow the swept
//! value.

use std::path::Path;

use rayon::prelude::*;
use toml::Value;

use crate::config::{parse_scenario, ConfigError};
use crate::output::{num, CsvRow};
use crate::run::{run_scenario, RunReport};

/// Outcome of one sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<RunReport, String>,
}

impl SweepPoint {
    /// CSV row; a failed run puts `error: <message>` in the result column
    /// and leaves the numeric columns empty.
    pub fn row(&self, scenario: &str, parameter: &str, deterministic: bool) -> CsvRow {
        match &self.outcome {
            Ok(r) => CsvRow::from_report(r, parameter, &num(self.value), deterministic),
            Err(e) => CsvRow {
                scenario: scenario.into(),
                parameter: parameter.into(),
                value: num(self.value),
                result: format!("error: {e}"),
                reference: String::new(),
                relative_error: String::new(),
                wall_ms: String::new(),
            },
        }
    }
}

/// Parse a comma-separated list of numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>, ConfigError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| ConfigError::new(format!("--values: `{}`: {e}", s.trim()))))
        .collect::<Result<_, _>>()?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(ConfigError::new("--values needs at least one finite number"));
    }
    Ok(values)
}

fn is_quantity_string(s: &str) -> bool {
    s.split_whitespace().next().is_some_and(|n| n.parse::<f64>().is_ok())
}

/// Replace the numeric entry at dotted `path` (array indices are numbers,
/// e.g. `sources.0.length`). A missing final key is created inside an
/// existing table. Quantity strings are replaced by the SI number.
pub fn set_path(doc: &mut Value, path: &str, value: f64) -> Result<(), ConfigError> {
    let keys: Vec<&str> = path.split('.').collect();
    let (last, parents) = keys.split_last().filter(|(l, _)| !l.is_empty()).ok_or_else(|| ConfigError::new("empty --param path"))?;
    let mut node = doc;
    for (depth, key) in parents.iter().enumerate() {
        let here = keys[..=depth].join(".");
        node = match node {
            Value::Table(t) => t.get_mut(*key),
            Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| ConfigError::new(format!("--param `{path}`: `{here}` does not exist")))?;
    }
    let integral = value.fract() == 0.0 && value.abs() < 9.0e15;
    let replacement = |old: Option<&Value>| -> Result<Value, ConfigError> {
        match old {
            Some(Value::Integer(_)) if !integral => Err(ConfigError::new(format!("--param `{path}` is an integer, got {value}"))),
            Some(Value::Integer(_)) => Ok(Value::Integer(value as i64)),
            Some(Value::Float(_)) => Ok(Value::Float(value)),
            Some(Value::String(s)) if is_quantity_string(s) => Ok(Value::Float(value)),
            Some(other) => Err(ConfigError::new(format!(
                "--param `{path}` is not numeric (found {})",
                other.type_str()
            ))),
            None if integral => Ok(Value::Integer(value as i64)),
            None => Ok(Value::Float(value)),
        }
    };
    match node {
        Value::Table(t) => {
            let new = replacement(t.get(*last))?;
            t.insert((*last).to_string(), new);
        }
        Value::Array(a) => {
            let i: usize = last.parse().map_err(|_| ConfigError::new(format!("--param `{path}`: `{last}` is not an index")))?;
            let slot = a.get_mut(i).ok_or_else(|| ConfigError::new(format!("--param `{path}`: index {i} out of range")))?;
            *slot = replacement(Some(slot))?;
        }
        other => {
            return Err(ConfigError::new(format!("--param `{path}`: parent is a {}", other.type_str())));
        }
    }
    Ok(())
}

/// Check the sweep is well-formed before running anything: the text
/// parses, the path is numeric, and every edited config validates.
pub fn prepare(text: &str, base_dir: &Path, path: &str, values: &[f64]) -> Result<Vec<String>, ConfigError> {
    parse_scenario(text, base_dir)?;
    let doc: Value = toml::from_str(text).map_err(|e| ConfigError::new(e.to_string()))?;
    values
        .iter()
        .map(|&v| {
            let mut d = doc.clone();
            set_path(&mut d, path, v)?;
            let edited = toml::to_string(&d).map_err(|e| ConfigError::new(e.to_string()))?;
            parse_scenario(&edited, base_dir).map_err(|e| ConfigError::new(format!("with {path} = {v}: {e}")))?;
            Ok(edited)
        })
        .collect()
}

/// Run every point, `parallel` at a time, keeping row order.
pub fn sweep(text: &str, base_dir: &Path, path: &str, values: &[f64], parallel: usize) -> Result<Vec<SweepPoint>, ConfigError> {
    let texts = prepare(text, base_dir, path, values)?;
    let one = |(edited, &value): (&String, &f64)| {
        let config = parse_scenario(edited, base_dir).expect("checked by prepare");
        SweepPoint { value, outcome: run_scenario(&config, base_dir).map_err(|e| e.to_string()) }
    };
    let points = if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| ConfigError::new(format!("--parallel: {e}")))?;
        pool.install(|| texts.par_iter().zip(values.par_iter()).map(one).collect())
    } else {
        texts.iter().zip(values).map(one).collect()
    };
    Ok(points)
}
