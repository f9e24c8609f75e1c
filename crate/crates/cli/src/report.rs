//! Report rows, CSV emission and the run-metadata sidecar.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 8] = [
    "quantity",
    "predicted",
    "measured",
    "tolerance",
    "verdict",
    "citation",
    "censored_fraction",
    "wall_time_s",
];
pub const CSV_FILE: &str = "report.csv";
pub const META_FILE: &str = "report.meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The run could not decide, e.g. too many censored paths.
    Inconclusive,
    /// Informational row with no comparison.
    Info,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Info => "INFO",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub quantity: String,
    pub predicted: String,
    pub measured: String,
    pub tolerance: String,
    pub verdict: Verdict,
    pub citation: String,
    pub censored_fraction: String,
    pub wall_time_s: String,
}

/// Shortest round-trip form; scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl Row {
    pub fn new(quantity: impl Into<String>, citation: &str, verdict: Verdict) -> Self {
        Row {
            quantity: quantity.into(),
            predicted: String::new(),
            measured: String::new(),
            tolerance: String::new(),
            verdict,
            citation: citation.to_string(),
            censored_fraction: String::new(),
            wall_time_s: String::new(),
        }
    }

    pub fn predicted(mut self, v: impl Into<String>) -> Self {
        self.predicted = v.into();
        self
    }

    pub fn measured(mut self, v: impl Into<String>) -> Self {
        self.measured = v.into();
        self
    }

    pub fn tolerance(mut self, v: impl Into<String>) -> Self {
        self.tolerance = v.into();
        self
    }

    pub fn censored(mut self, f: f64) -> Self {
        self.censored_fraction = num(f);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Global verdict: no row failed or was inconclusive.
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.verdict, Verdict::Pass | Verdict::Info))
    }

    /// Fill the wall-time column of every row.
    pub fn stamp_wall_time(&mut self, seconds: f64) {
        for r in &mut self.rows {
            r.wall_time_s = format!("{seconds:.3}");
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.quantity.as_str(),
                &r.predicted,
                &r.measured,
                &r.tolerance,
                r.verdict.as_str(),
                &r.citation,
                &r.censored_fraction,
                &r.wall_time_s,
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn read_csv(path: &Path) -> io::Result<Report> {
        let mut rdr = csv::Reader::from_path(path).map_err(io::Error::other)?;
        let header: Vec<String> = rdr
            .headers()
            .map_err(io::Error::other)?
            .iter()
            .map(String::from)
            .collect();
        if header != CSV_HEADER {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("unexpected header {header:?}"),
            ));
        }
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<Row>() {
            rows.push(rec.map_err(io::Error::other)?);
        }
        Ok(Report { rows })
    }
}

/// Run metadata written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    pub passed: bool,
    pub config: serde_json::Value,
}

/// Write `report.csv` and `report.meta.json` into `dir`.
pub fn emit(report: &Report, meta: &RunMeta, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(CSV_FILE);
    fs::write(&csv_path, report.to_csv())?;
    let meta_path = dir.join(META_FILE);
    let mut text = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(&meta_path, text)?;
    Ok((csv_path, meta_path))
}
