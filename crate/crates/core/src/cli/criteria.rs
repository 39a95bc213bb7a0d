//! Pass/fail evaluation of the acceptance criteria from the files written by
//! the other commands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::commands::{read_json, ScanFile, SpectralSummary, QuasimodeSummary, SteadySummary};
use crate::evolution::{ConsistencyReport, InvariantReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The command producing the evidence has not been run.
    Missing,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Criterion {
    pub fn line(&self) -> String {
        let s = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Missing => "MISSING",
        };
        format!("[{s:>7}] {:>2} {:<28} {}", self.id, self.name, self.detail)
    }
}

fn row(id: u8, name: &str, ok: bool, detail: String) -> Criterion {
    Criterion {
        id,
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
    }
}

fn missing(id: u8, name: &str, file: &str) -> Criterion {
    Criterion {
        id,
        name: name.into(),
        status: Status::Missing,
        detail: format!("{file} not found"),
    }
}

const REQUIRED_C: [f64; 3] = [0.5, 1.0, 2.0];

fn spectral_rows(s: &SpectralSummary) -> [Criterion; 3] {
    let covered = REQUIRED_C
        .iter()
        .all(|c| s.checks.iter().any(|ch| (ch.c - c).abs() < 1e-12));
    let max = |f: &dyn Fn(&super::commands::SpectralCheck) -> f64| s.checks.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let min = |f: &dyn Fn(&super::commands::SpectralCheck) -> f64| s.checks.iter().map(f).fold(f64::INFINITY, f64::min);

    let im = max(&|c| c.tau_im);
    let mm = max(&|c| c.mismatch);
    let res = max(&|c| c.ode_residual_fine);
    let c1 = row(
        1,
        "spectral existence",
        covered && im < 0.0 && mm <= 1e-8 && res <= 1e-6,
        format!("max Im tau {im:.4}, mismatch {mm:.2e}, fine-grid residual {res:.2e}"),
    );
    let dc = min(&|c| c.decay_c);
    let r2 = min(&|c| c.decay_r_squared);
    let shift = max(&|c| c.tau_shift_zmax);
    let c2 = row(
        2,
        "gaussian decay",
        covered && dc > 0.0 && r2 >= 0.99 && shift <= 1e-6,
        format!("min c {dc:.4}, min r2 {r2:.5}, tau shift under 1.5 z_max {shift:.2e}"),
    );
    let aux = max(&|c| c.aux_scaling);
    let c3 = row(
        3,
        "auxiliary scaling",
        covered && aux <= 1e-8,
        format!("max relative |alpha(2C) - 2 alpha(C)| {aux:.2e}"),
    );
    [c1, c2, c3]
}

fn quasimode_rows(q: &QuasimodeSummary) -> [Criterion; 2] {
    let finite = q.rows.iter().all(|r| r.bound_constant.is_finite());
    let c4 = row(
        4,
        "quasimode residual bound",
        finite && q.bound_spread <= 3.0,
        format!(
            "bound constants [{}], spread {:.3} (<= 3)",
            q.rows.iter().map(|r| format!("{:.4}", r.bound_constant)).collect::<Vec<_>>().join(", "),
            q.bound_spread
        ),
    );
    let c5 = row(
        5,
        "growth sandwich",
        q.c1 > 0.0 && q.c2_spread <= 2.0 && q.s0_max.is_finite(),
        format!(
            "c1 {:.4}, c2 [{}] spread {:.3} (<= 2), s0 in [{:.4}, {:.4}]",
            q.c1,
            q.rows.iter().map(|r| format!("{:.4}", r.upper_const)).collect::<Vec<_>>().join(", "),
            q.c2_spread,
            q.s0_min,
            q.s0_max
        ),
    );
    [c4, c5]
}

fn consistency_row(c: &ConsistencyReport) -> Criterion {
    let (lo, hi) = c.amp_ratio_range();
    row(
        7,
        "evolution vs quasimode",
        lo >= 0.5 && hi <= 2.0,
        format!(
            "eps {:.1e}: norm/predicted in [{lo:.4}, {hi:.4}] (band [0.5, 2]), gamma {:.2} vs {:.2}",
            c.eps, c.gamma, c.predicted_rate
        ),
    )
}

fn scan_row(s: &ScanFile) -> Criterion {
    let m = &s.main;
    let half = m.verdicts.iter().find(|v| (v.delta - 0.5 * m.slope).abs() <= 1e-12 * m.slope.abs().max(1.0));
    let grows = half.is_some_and(|v| v.grows);
    let main_min = m.gamma_over_sqrt_k.iter().cloned().fold(f64::INFINITY, f64::min);
    let (control_ok, control_detail) = match &s.control {
        Some((c, at_main)) => {
            let c_max = c.gamma_over_sqrt_k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let smaller = c_max <= main_min / 5.0;
            let bounded = at_main
                .iter()
                .all(|v| v.sups.iter().all(|x| x.is_finite()) && v.ratios.iter().all(|&r| r < 1.5));
            (
                smaller && bounded,
                format!("control {} max gamma/sqrt(k) {c_max:.4}, bounded {bounded}", c.flow),
            )
        }
        None => (false, "no control run".into()),
    };
    row(
        8,
        "ill-posedness signature",
        m.slope > 0.0 && m.r_squared >= 0.95 && grows && control_ok,
        format!(
            "slope {:.4}, r2 {:.4}, sup ratios at slope/2 [{}]; {control_detail}",
            m.slope,
            m.r_squared,
            half.map(|v| v.ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", "))
                .unwrap_or_default()
        ),
    )
}

fn steady_row(s: &SteadySummary) -> Criterion {
    match s.blasius_errors {
        Some([e1, e2]) => row(
            9,
            "steady blasius round trip",
            e1 <= 0.02 && e2 < e1,
            format!("max error {e1:.3e} at default, {e2:.3e} refined"),
        ),
        None => Criterion {
            id: 9,
            name: "steady blasius round trip".into(),
            status: Status::Missing,
            detail: format!("steady ran on {}, not on the Blasius inflow", s.source),
        },
    }
}

fn invariant_rows(inv: &InvariantReport) -> [Criterion; 2] {
    let c6 = row(
        6,
        "volterra inversion",
        inv.volterra_ok(),
        format!("{} trials, max round-trip error {:.2e}", inv.volterra_trials, inv.volterra_max_error),
    );
    let failed: Vec<&str> = inv.checks().iter().filter(|c| !c.1).map(|c| c.0).collect();
    let c10 = row(
        10,
        "structural invariants",
        inv.structural_ok(),
        format!(
            "linearity {:.1e}, evolution gap {:.1e}->{:.1e}, wall {:.1e}->{:.1e}, div {:.1e}->{:.1e}, homogeneity {:.1e}{}",
            inv.linearity,
            inv.evolution_gap[0],
            inv.evolution_gap[1],
            inv.wall_defect[0],
            inv.wall_defect[1],
            inv.incompressibility[0],
            inv.incompressibility[1],
            inv.homogeneity,
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        ),
    );
    [c6, c10]
}

/// Every criterion, in order, from the outputs present in `dir`.
pub fn evaluate(dir: &Path) -> Vec<Criterion> {
    let mut out = Vec::new();
    match read_json::<SpectralSummary>(&dir.join("spectral.json")) {
        Ok(s) => out.extend(spectral_rows(&s)),
        Err(_) => {
            out.push(missing(1, "spectral existence", "spectral.json"));
            out.push(missing(2, "gaussian decay", "spectral.json"));
            out.push(missing(3, "auxiliary scaling", "spectral.json"));
        }
    }
    match read_json::<QuasimodeSummary>(&dir.join("quasimode_summary.json")) {
        Ok(q) => out.extend(quasimode_rows(&q)),
        Err(_) => {
            out.push(missing(4, "quasimode residual bound", "quasimode_summary.json"));
            out.push(missing(5, "growth sandwich", "quasimode_summary.json"));
        }
    }
    let inv = read_json::<InvariantReport>(&dir.join("invariants.json")).ok();
    out.push(match &inv {
        Some(i) => invariant_rows(i)[0].clone(),
        None => missing(6, "volterra inversion", "invariants.json"),
    });
    out.push(match read_json::<ConsistencyReport>(&dir.join("consistency.json")) {
        Ok(c) => consistency_row(&c),
        Err(_) => missing(7, "evolution vs quasimode", "consistency.json"),
    });
    out.push(match read_json::<ScanFile>(&dir.join("scan.json")) {
        Ok(s) => scan_row(&s),
        Err(_) => missing(8, "ill-posedness signature", "scan.json"),
    });
    out.push(match read_json::<SteadySummary>(&dir.join("steady.json")) {
        Ok(s) => steady_row(&s),
        Err(_) => missing(9, "steady blasius round trip", "steady.json"),
    });
    out.push(match &inv {
        Some(i) => invariant_rows(i)[1].clone(),
        None => missing(10, "structural invariants", "invariants.json"),
    });
    out
}
