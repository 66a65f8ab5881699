//! Minimal CSV tables: a fixed header, comma separators, LF line endings and
//! shortest round-trip float formatting.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{DnlsError, Result};

use super::conservation::ConservationRow;
use super::convergence::ConvergenceReport;
use super::tail::TailReport;

pub const SIMULATE_HEADER: [&str; 7] = ["run_id", "t", "mass", "energy", "momentum", "hs_norm", "fl_norm"];
pub const CONVERGE_HEADER: [&str; 3] = ["n", "err_hs", "err_fl"];
pub const TAIL_HEADER: [&str; 3] = ["n", "sup_tail_hs", "data_tail_hs"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:?}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

/// One experiment's output.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvRecord {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(DnlsError::Precondition(format!(
                "row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        if let Some(Cell::Text(t)) = row.iter().find(|c| matches!(c, Cell::Text(t) if t.contains([',', '\n', '"']))) {
            return Err(DnlsError::Precondition(format!("text cell {t:?} needs quoting")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{cell}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

pub fn simulate_csv(run_id: &str, rows: &[ConservationRow]) -> Result<CsvRecord> {
    let mut rec = CsvRecord::new(&SIMULATE_HEADER);
    for r in rows {
        rec.push(vec![
            Cell::Text(run_id.to_string()),
            Cell::Float(r.t),
            Cell::Float(r.mass),
            Cell::Float(r.energy),
            Cell::Float(r.momentum),
            Cell::Float(r.hs_norm),
            Cell::Float(r.fl_norm),
        ])?;
    }
    Ok(rec)
}

/// The simulate columns followed by `tail_hs_<N>` for each tail cutoff.
pub fn conserve_csv(run_id: &str, rows: &[ConservationRow], tail_ns: &[usize]) -> Result<CsvRecord> {
    let extra: Vec<String> = tail_ns.iter().map(|n| format!("tail_hs_{n}")).collect();
    let mut header: Vec<&str> = SIMULATE_HEADER.to_vec();
    header.extend(extra.iter().map(String::as_str));
    let mut rec = CsvRecord::new(&header);
    let base = simulate_csv(run_id, rows)?;
    for (mut cells, r) in base.rows.into_iter().zip(rows) {
        cells.extend(r.tails.iter().map(|&v| Cell::Float(v)));
        rec.push(cells)?;
    }
    Ok(rec)
}

pub fn converge_csv(report: &ConvergenceReport) -> Result<CsvRecord> {
    let mut rec = CsvRecord::new(&CONVERGE_HEADER);
    for l in &report.levels {
        rec.push(vec![Cell::Int(l.n as i64), Cell::Float(l.err_hs), Cell::Float(l.err_fl)])?;
    }
    Ok(rec)
}

pub fn tail_csv(report: &TailReport) -> Result<CsvRecord> {
    let mut rec = CsvRecord::new(&TAIL_HEADER);
    for (r, d) in report.rows.iter().zip(report.data_tail_column()) {
        rec.push(vec![Cell::Int(r.n as i64), Cell::Float(r.sup_tail_hs), Cell::Float(d)])?;
    }
    Ok(rec)
}
