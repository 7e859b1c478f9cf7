//! CSV tables with a one-line header. Reals are written with 17 significant
//! digits (`{:.16e}`), LF line endings, no trailing separators.

use std::fs::File;
use std::path::Path;

use csv::{ReaderBuilder, Terminator, WriterBuilder};

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), String> {
    let file = File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(file);
    let err = |e: csv::Error| format!("cannot write {}: {e}", path.display());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render)).map_err(err)?;
    }
    w.flush().map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// A numeric table: header names and rows of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Column by header name.
    pub fn column(&self, name: &str) -> Result<Vec<f64>, String> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("missing column {name:?} (have {:?})", self.header))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table, String> {
    let mut r = ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| format!("{} line {}: {s:?} is not a number", path.display(), i + 2))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
