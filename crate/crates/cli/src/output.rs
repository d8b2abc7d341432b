//! Report, CSV, phase and energy files.
//!
//! Every number is printed with 12 significant digits (`{:.11e}`).
//! Timestamps and wall times live only in the report header and the
//! `wall_ms` CSV column; `deterministic` mode blanks both, so identical
//! configs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::{OutputKind, ScenarioConfig};
use crate::run::{output_path, Bound, OutputStatus, RunReport};

/// Fixed CSV header.
pub const CSV_COLUMNS: [&str; 7] = ["scenario", "parameter", "value", "result", "reference", "relative_error", "wall_ms"];

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One CSV row. Empty strings stand for "not applicable".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsvRow {
    pub scenario: String,
    pub parameter: String,
    pub value: String,
    pub result: String,
    pub reference: String,
    pub relative_error: String,
    pub wall_ms: String,
}

impl CsvRow {
    pub fn from_report(report: &RunReport, parameter: &str, value: &str, deterministic: bool) -> Self {
        Self {
            scenario: report.scenario.clone(),
            parameter: parameter.into(),
            value: value.into(),
            result: num(report.result),
            reference: opt(report.reference),
            relative_error: opt(report.relative_error),
            wall_ms: if deterministic { String::new() } else { num(report.wall_ms) },
        }
    }
}

pub fn csv_text(rows: &[CsvRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn named_block(title: &str, unit: &str, items: &[(String, f64)]) -> String {
    let mut s = String::new();
    if items.is_empty() {
        return s;
    }
    let _ = writeln!(s, "[{title}]");
    for (name, v) in items {
        let _ = writeln!(s, "{name} = {}{}", num(*v), if unit.is_empty() { String::new() } else { format!(" {unit}") });
    }
    s
}

/// Human-readable report. The header holds the only time-dependent lines.
pub fn report_text(report: &RunReport, deterministic: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# abphase {} report", report.tool_version);
    if !deterministic {
        let _ = writeln!(s, "# timestamp {}", chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        let _ = writeln!(s, "# wall_ms {}", num(report.wall_ms));
    }
    let _ = writeln!(s, "scenario = {}", report.scenario);
    let _ = writeln!(s, "kind = {}", report.kind.name());
    let _ = writeln!(s, "digest = sha256:{}", report.digest);
    let (name, unit) = report.result_label;
    let _ = writeln!(s, "\n[result]");
    let _ = writeln!(s, "quantity = {name} ({unit})");
    let _ = writeln!(s, "result = {}", num(report.result));
    let _ = writeln!(s, "reference = {}", report.reference.map_or("none".into(), num));
    let _ = writeln!(s, "relative_error = {}", report.relative_error.map_or("none".into(), num));
    for (title, unit, items) in [
        ("phases", "rad", &report.phases),
        ("energies", "J", &report.energies),
        ("diagnostics", "", &report.diagnostics),
    ] {
        let block = named_block(title, unit, items);
        if !block.is_empty() {
            let _ = write!(s, "\n{block}");
        }
    }
    if !report.gates.is_empty() {
        let _ = writeln!(s, "\n[gates]");
        for g in &report.gates {
            let op = match g.bound {
                Bound::Below => "<",
                Bound::Above => ">",
            };
            let verdict = if g.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{verdict} {} = {} {op} {}", g.name, num(g.measured), num(g.limit));
        }
    }
    if !report.outputs.is_empty() {
        let _ = writeln!(s, "\n[outputs]");
        for o in &report.outputs {
            match &o.error {
                None => {
                    let _ = writeln!(s, "{} {} ok", o.kind.name(), o.path.display());
                }
                Some(e) => {
                    let _ = writeln!(s, "{} {} ERROR {e}", o.kind.name(), o.path.display());
                }
            }
        }
    }
    for n in &report.notes {
        let _ = writeln!(s, "\nnote: {n}");
    }
    s
}

fn values_text(report: &RunReport, kind: OutputKind) -> Result<String, String> {
    let (title, unit, items) = match kind {
        OutputKind::Phase => ("phases", "rad", &report.phases),
        OutputKind::Energy => ("energies", "J", &report.energies),
        _ => unreachable!(),
    };
    if items.is_empty() {
        return Err(format!("scenario kind {} produces no {title}", report.kind.name()));
    }
    let mut s = named_block(title, unit, items);
    if kind == OutputKind::Phase && report.result_label.1 == "rad" {
        let _ = writeln!(s, "difference = {} rad", num(report.result));
    }
    Ok(s)
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Write every requested output, recording per-output failures in the
/// report. Reports are written last so they list the other outputs.
/// Returns true when all outputs were produced.
pub fn write_outputs(config: &ScenarioConfig, report: &mut RunReport, out_dir: &Path, deterministic: bool) -> bool {
    report.outputs.clear();
    let (reports, others): (Vec<_>, Vec<_>) = config.outputs.iter().partition(|o| o.kind == OutputKind::Report);
    for o in others {
        let path = output_path(out_dir, &o.path);
        let text = match o.kind {
            OutputKind::Csv => Ok(csv_text(&[CsvRow::from_report(report, "", "", deterministic)])),
            kind => values_text(report, kind),
        };
        let error = text.and_then(|t| write_file(&path, &t)).err();
        report.outputs.push(OutputStatus { kind: o.kind, path: o.path.clone(), error });
    }
    for o in reports {
        let path = output_path(out_dir, &o.path);
        report.outputs.push(OutputStatus { kind: o.kind, path: o.path.clone(), error: None });
        let text = report_text(report, deterministic);
        if let Err(e) = write_file(&path, &text) {
            report.outputs.last_mut().expect("just pushed").error = Some(e);
        }
    }
    report.outputs.iter().all(|o| o.error.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-0.000123456789012345), "-1.23456789012e-4");
    }

    #[test]
    fn csv_header_is_fixed() {
        let text = csv_text(&[]);
        assert_eq!(text, "scenario,parameter,value,result,reference,relative_error,wall_ms\n");
    }
}
