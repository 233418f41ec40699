//! Tables written as CSV or JSON, and solve traces.
//!
//! Floats use the shortest decimal string that parses back to the same value,
//! so identical runs give byte-identical files and every file round-trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use painleve_core::integrator::SolveRecord;
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Shortest round-trip representation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<PathBuf, CliError> {
        match format {
            Format::Csv => {
                let path = path.with_extension("csv");
                self.write_csv(&path)?;
                Ok(path)
            }
            Format::Json => {
                let path = path.with_extension("json");
                self.write_json(&path)?;
                Ok(path)
            }
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, v) in self.columns.iter().zip(row) {
                    m.insert(k.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut f = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut f, &rows)?;
        f.write_all(b"\n")?;
        f.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`Table::write_csv`]; cells are typed by the
    /// column types of `like`.
    pub fn read_csv(path: &Path, like: &Table) -> Result<Table, CliError> {
        let mut r = csv::Reader::from_path(path)?;
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let template = like.rows.first();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(i, s)| parse_cell(s, template.map(|t| &t[i])))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn parse_cell(s: &str, like: Option<&Cell>) -> Result<Cell, CliError> {
    let bad = || CliError::Config(format!("cannot parse cell `{s}`"));
    Ok(match like {
        Some(Cell::Float(_)) => Cell::Float(parse_f64(s).ok_or_else(bad)?),
        Some(Cell::Int(_)) => Cell::Int(s.parse().map_err(|_| bad())?),
        Some(Cell::Bool(_)) => Cell::Bool(s.parse().map_err(|_| bad())?),
        _ => Cell::Text(s.to_string()),
    })
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub const TRACE_COLUMNS: [&str; 8] = [
    "re_t",
    "im_t",
    "re_y",
    "im_y",
    "re_yp",
    "im_yp",
    "arclength",
    "segment_index",
];
pub const POLE_COLUMNS: [&str; 5] = [
    "re_t0",
    "im_t0",
    "re_residue",
    "im_residue",
    "detour_radius",
];

/// `trace.csv` → `trace.poles.csv`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.poles.csv"))
}

pub fn trace_table(record: &SolveRecord) -> (Table, Table) {
    let mut trace = Table::new(&TRACE_COLUMNS);
    for c in &record.checkpoints {
        trace.push(vec![
            c.t.re.into(),
            c.t.im.into(),
            c.y.re.into(),
            c.y.im.into(),
            c.yp.re.into(),
            c.yp.im.into(),
            c.arclength.into(),
            c.segment_index.into(),
        ]);
    }
    let mut poles = Table::new(&POLE_COLUMNS);
    for p in &record.poles {
        poles.push(vec![
            p.location.re.into(),
            p.location.im.into(),
            p.residue.re.into(),
            p.residue.im.into(),
            p.detour_radius.into(),
        ]);
    }
    (trace, poles)
}

/// Writes the checkpoints of `record` to `path` and its poles to the sidecar.
pub fn emit_trace(record: &SolveRecord, path: &Path) -> Result<PathBuf, CliError> {
    let (trace, poles) = trace_table(record);
    trace.write_csv(path)?;
    let side = sidecar_path(path);
    poles.write_csv(&side)?;
    Ok(side)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Config(format!(
            "output directory {} is not writable: {e}",
            dir.display()
        ))
    })?;
    let probe = dir.join(".write_probe");
    File::create(&probe)
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e: io::Error| {
            CliError::Config(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })
}
