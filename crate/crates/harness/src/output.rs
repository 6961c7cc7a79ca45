//! Result tables as CSV (header row always present) or as a JSON array of
//! row objects; see `schema/results.schema.json`.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

pub const COLUMNS: [&str; 10] = [
    "snr_db",
    "decoder",
    "trials",
    "errors",
    "bler",
    "ci_lo",
    "ci_hi",
    "mean_norm_complexity",
    "accuracy",
    "s_size",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub decoder: String,
    pub trials: u64,
    pub errors: u64,
    pub bler: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_norm_complexity: f64,
    /// First-error-in-S ratio; SC rows with at least one failure only.
    pub accuracy: Option<f64>,
    pub s_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(HarnessError::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

pub fn write_results<W: Write>(rows: &[ResultRow], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(COLUMNS)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush().map_err(|e| HarnessError::Io { path: "<output>".into(), source: e })?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out).map_err(|e| HarnessError::Io { path: "<output>".into(), source: e })?;
        }
    }
    Ok(())
}

pub fn emit_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_results(rows, format, std::io::BufWriter::new(file))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_json(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
