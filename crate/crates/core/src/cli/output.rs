//! CSV and JSON emission with fixed float formatting.

use serde::Serialize;

use super::commands::{CompareReport, OracleReport, ReportRow};
use crate::error::{Error, Result};

pub const ROW_HEADER: [&str; 15] = [
    "tilde_eps",
    "eps",
    "E_bar",
    "I_bar",
    "I_slope",
    "delta",
    "delta_E",
    "E_plus",
    "E_minus",
    "dE_trans_plus",
    "dE_trans_minus",
    "oracle_E0",
    "oracle_E1",
    "oracle_split",
    "warn_flags",
];

pub const COMPARE_HEADER: [&str; 3] = ["method", "delta_E", "rel_error"];

pub const ORACLE_HEADER: [&str; 7] = ["grid", "n_points", "step", "E0", "E1", "splitting", "est_error"];

/// Seventeen significant digits, so values round-trip exactly.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot write output: {e}"))
}

fn table<const N: usize>(header: [&str; N], records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in records {
        w.write_record(&r).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

pub fn rows_csv(rows: &[ReportRow]) -> Result<String> {
    table(
        ROW_HEADER,
        rows.iter().map(|r| {
            let flags: Vec<&str> = r.warn_flags.iter().map(|f| f.as_str()).collect();
            vec![
                float(r.tilde_eps),
                float(r.eps),
                float(r.mean_energy),
                float(r.action),
                float(r.slope),
                float(r.delta),
                float(r.delta_e),
                float(r.e_lower),
                float(r.e_upper),
                optional(r.transcendental_lower),
                optional(r.transcendental_upper),
                optional(r.oracle_e0),
                optional(r.oracle_e1),
                optional(r.oracle_split),
                flags.join("|"),
            ]
        }),
    )
}

pub fn compare_csv(report: &CompareReport) -> Result<String> {
    table(
        COMPARE_HEADER,
        report.rows.iter().map(|r| vec![r.method.as_str().to_string(), optional(r.delta_e), optional(r.rel_error)]),
    )
}

pub fn oracle_csv(report: &OracleReport) -> Result<String> {
    let s = &report.spectrum;
    let names = ["coarse", "fine"];
    let mut records: Vec<Vec<String>> = s
        .grids
        .iter()
        .zip(names)
        .map(|(g, name)| {
            vec![
                name.to_string(),
                g.n_points.to_string(),
                float(g.step),
                float(g.e0),
                float(g.e1),
                float(g.splitting),
                String::new(),
            ]
        })
        .collect();
    if let Some(err) = s.est_error {
        records.push(vec![
            "extrapolated".to_string(),
            String::new(),
            String::new(),
            float(s.e0),
            float(s.e1),
            float(s.splitting),
            float(err),
        ]);
    }
    table(ORACLE_HEADER, records)
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(csv_error)?;
    text.push('\n');
    Ok(text)
}
