use std::path::Path;

use super::{ModeEvolution, ScanResult};
use crate::error::Result;

/// `k, gamma, gamma_over_sqrt_k, regularized_sup, verdict`, the regularized
/// supremum taken at the first tested `δ`.
pub fn write_scan_csv(path: &Path, scan: &ScanResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "gamma", "gamma_over_sqrt_k", "delta", "regularized_sup", "verdict"])?;
    let first = scan.verdicts.first();
    let verdict = if scan.ill_posed_signature { "yes" } else { "no" };
    for (i, row) in scan.rows.iter().enumerate() {
        let (delta, sup) = match first {
            Some(v) => (v.delta, v.sups[i]),
            None => (0.0, row.regularized_sup(0.0, scan.sigma)),
        };
        w.write_record([
            format!("{}", row.k),
            format!("{:.10e}", row.gamma),
            format!("{:.10e}", row.gamma_over_sqrt_k),
            format!("{delta:.10e}"),
            format!("{sup:.10e}"),
            verdict.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `x, norm` at every level.
pub fn write_evolution_csv(path: &Path, ev: &ModeEvolution) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "norm"])?;
    for (x, n) in ev.xs.iter().zip(&ev.norms) {
        w.write_record([format!("{x:.10e}"), format!("{n:.10e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// `x, y, re_u, im_u` for every stored snapshot.
pub fn write_snapshot_csv(path: &Path, ev: &ModeEvolution) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "re_u", "im_u"])?;
    for snap in &ev.snapshots {
        for (y, u) in ev.ygrid.nodes().iter().zip(&snap.u_hat) {
            w.write_record([
                format!("{:.10e}", snap.x),
                format!("{y:.10e}"),
                format!("{:.10e}", u.re),
                format!("{:.10e}", u.im),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
