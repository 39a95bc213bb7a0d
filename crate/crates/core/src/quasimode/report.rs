use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::residual::ResidualReport;
use crate::error::Result;

/// One row of the ε-ladder summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsSummary {
    pub eps: f64,
    pub bound_constant: f64,
    pub lower_const: f64,
    pub upper_const: f64,
    pub s0_min: f64,
    pub s0_max: f64,
    pub delta0_effective: f64,
}

impl From<&ResidualReport> for EpsSummary {
    fn from(r: &ResidualReport) -> Self {
        Self {
            eps: r.eps,
            bound_constant: r.bound_constant,
            lower_const: r.sandwich.lower_const,
            upper_const: r.sandwich.upper_const,
            s0_min: r.sandwich.s0_min,
            s0_max: r.sandwich.s0_max,
            delta0_effective: r.delta0_effective,
        }
    }
}

pub fn write_report_json(path: &Path, report: &ResidualReport) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Per-station rows: x, J_norm, amp and the norm ratios.
pub fn write_report_csv(path: &Path, report: &ResidualReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[EpsSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
