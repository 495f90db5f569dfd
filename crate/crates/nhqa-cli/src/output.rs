//! CSV tables and the JSON sidecar.

use crate::error::CliError;
use crate::runspec::RunSpec;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::F(x.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Scientific notation with 15 significant digits and a signed two-digit
/// exponent, e.g. `-1.23450000000000e-03`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.14e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub fn sidecar(job: &RunSpec, table: &Table, threads: usize, wall_time: f64) -> serde_json::Value {
    let p = &job.params;
    json!({
        "command": job.command.name(),
        "params": { "J": p.j, "g": p.g, "delta": p.delta, "tau": p.tau, "N": p.n },
        "sweeps": job.sweeps.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "engine": job.engine.name(),
        "integrator": {
            "rtol": job.integrator.rel_tol,
            "atol": job.integrator.abs_tol,
            "max_step": job.integrator.max_step.unwrap_or(p.tau / 1000.0),
            "method": "dopri5",
        },
        "modes": job.modes,
        "samples": job.samples,
        "target": job.target,
        "threads": threads,
        "columns": table.header,
        "rows": table.rows.len(),
        "versions": { "nhqa-cli": env!("CARGO_PKG_VERSION"), "nhqa-core": nhqa_core::VERSION },
        "wall_time_s": wall_time,
    })
}
