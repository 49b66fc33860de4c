//! Diagnostics table: fixed columns, 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::criteria::DiagnosticsRecord;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 23] = [
    "t",
    "energy",
    "grad_sq",
    "Y",
    "A32_sq",
    "cond_i",
    "cond_ii",
    "cond_iii",
    "cond_iv",
    "a",
    "a_plus_cubed",
    "a_minus_fifth",
    "cross_term",
    "cancel_resid",
    "ineq_3_2_lhs",
    "ineq_3_2_rhs",
    "ineq_3_3_lhs",
    "ineq_3_3_rhs",
    "ineq_3_5_slack",
    "ineq_3_10_lhs",
    "ineq_3_10_rhs",
    "envelope",
    "envelope_ok",
];

/// Row values in column order; `envelope_ok` maps to 1 or 0.
pub fn row_values(r: &DiagnosticsRecord) -> [f64; 23] {
    let i = &r.integrands;
    let b = &r.bands;
    [
        r.t,
        i.energy,
        i.grad_sq,
        i.y,
        i.a32_sq,
        i.cond_i,
        i.cond_ii,
        i.cond_iii,
        i.cond_iv,
        i.a,
        i.a_plus_cubed,
        i.a_minus_fifth,
        r.cross_term,
        r.cancel_resid,
        b.ineq_3_2_lhs,
        b.ineq_3_2_rhs,
        b.ineq_3_3_lhs,
        b.ineq_3_3_rhs,
        b.ineq_3_5_slack,
        b.ineq_3_10_lhs,
        b.ineq_3_10_rhs,
        r.envelope,
        if r.envelope_ok { 1.0 } else { 0.0 },
    ]
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = COLUMNS.join(",");
    s.push('\n');
    for r in records {
        let vals = row_values(r);
        for (j, v) in vals.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            if j == 22 {
                s.push_str(if r.envelope_ok { "true" } else { "false" });
            } else {
                let _ = write!(s, "{}", format_number(*v));
            }
        }
        s.push('\n');
    }
    s
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    std::fs::write(path, diagnostics_csv(records))?;
    Ok(())
}

/// A parsed numeric table; `true`/`false` read as 1/0.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (no, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|f| match f.trim() {
                    "true" => Ok(1.0),
                    "false" => Ok(0.0),
                    v => v.parse::<f64>().map_err(|_| Error::Parse(format!("csv row {}: bad value {v:?}", no + 1))),
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!("csv row {}: {} fields, expected {}", no + 1, row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}
