//! Report records and their CSV/JSON serialisation.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no results to write")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One checked claim `lhs ≤ rhs` (up to `tol`), with `margin = lhs − rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub params: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
    pub seed: u64,
    /// Excluded from the replay contract.
    pub wall_ms: u64,
}

impl Record {
    pub fn new(check: impl Into<String>, params: serde_json::Value, lhs: f64, rhs: f64, tol: f64, seed: u64) -> Self {
        let margin = lhs - rhs;
        Self { check: check.into(), params, lhs, rhs, margin, tol, pass: margin <= tol, seed, wall_ms: 0 }
    }

    /// Equality-type check: `lhs` counts mismatches, `rhs = 0`, `tol = 0`.
    pub fn count(check: impl Into<String>, params: serde_json::Value, mismatches: usize, seed: u64) -> Self {
        Self::new(check, params, mismatches as f64, 0.0, 0.0, seed)
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn with_wall_ms(mut self, ms: u64) -> Self {
        self.wall_ms = ms;
        self
    }

    /// Adds `key: value` to the params object.
    pub fn with_param(mut self, key: &str, value: serde_json::Value) -> Self {
        if let serde_json::Value::Object(map) = &mut self.params {
            map.insert(key.to_string(), value);
        }
        self
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    params: String,
    lhs: f64,
    rhs: f64,
    margin: f64,
    tol: f64,
    pass: bool,
    seed: u64,
    wall_ms: u64,
}

pub fn write_csv<W: Write>(records: &[Record], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            check: &r.check,
            params: serde_json::to_string(&r.params)?,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            tol: r.tol,
            pass: r.pass,
            seed: r.seed,
            wall_ms: r.wall_ms,
        })?;
    }
    w.flush().map_err(|e| ReportError::Io { path: "<csv>".into(), source: e })?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[Record], mut out: W) -> Result<(), ReportError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out).map_err(|e| ReportError::Io { path: "<json>".into(), source: e })?;
    Ok(())
}

/// Writes `results` to `path`, or to stdout when `path` is `None`.
pub fn emit_report(results: &[Record], path: Option<&Path>, format: Format) -> Result<(), ReportError> {
    if results.is_empty() {
        return Err(ReportError::Empty);
    }
    let io_err = |e| ReportError::Io { path: path.map(|p| p.display().to_string()).unwrap_or("<stdout>".into()), source: e };
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Csv => write_csv(results, sink),
        Format::Json => write_json(results, sink),
    }
}

/// Parses a JSON report back into records.
pub fn read_json(text: &str) -> Result<Vec<Record>, ReportError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_has_header_and_stable_columns() {
        let r = Record::new("demo", json!({"p": 2}), 1.0, 2.0, 1e-9, 7);
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "check,params,lhs,rhs,margin,tol,pass,seed,wall_ms");
        assert_eq!(lines.next().unwrap(), "demo,\"{\"\"p\"\":2}\",1.0,2.0,-1.0,1e-9,true,7,0");
        assert!(lines.next().is_none());
    }

    #[test]
    fn json_roundtrip_and_empty() {
        let rs = vec![
            Record::new("a", json!({}), 0.0, 0.0, 0.0, 1),
            Record::count("b", json!({"n": 3}), 2, 1),
        ];
        assert!(!rs[1].pass);
        let mut buf = Vec::new();
        write_json(&rs, &mut buf).unwrap();
        assert_eq!(read_json(std::str::from_utf8(&buf).unwrap()).unwrap(), rs);
        assert!(matches!(emit_report(&[], None, Format::Json), Err(ReportError::Empty)));
    }
}
