//! Marches quasimode initial data at k = 1/ε and compares the norm history
//! with the quasimode's own amplitude.
//!
//! `cargo run --example mode_march [eps]`

use prandtl_lab::base_flow::{analytic_profile, find_critical_point, CatalogId, CatalogParams};
use prandtl_lab::evolution::{evolve_quasimode_consistency, ConsistencyOptions, QuasimodeData};
use prandtl_lab::numerics::{build_stretched_grid, XGrid};
use prandtl_lab::quasimode::QuasimodeConfig;
use prandtl_lab::spectral::{solve_spectral, SpectralConfig};

fn main() -> prandtl_lab::Result<()> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse().expect("eps must be a number")).unwrap_or(1e-2);
    let flow = analytic_profile(
        CatalogId::CriticalShear,
        CatalogParams::default(),
        XGrid::uniform(1.0, 41)?,
        build_stretched_grid(40.0, 801, 3.0)?,
    )?;
    let a = find_critical_point(&flow)?;
    let spec = solve_spectral(flow.eval(0.0, a).u, &SpectralConfig::default())?;
    let template = QuasimodeConfig::new(eps);
    let data = QuasimodeData {
        flow: &flow,
        spec: &spec,
        template: &template,
    };
    let r = evolve_quasimode_consistency(&data, eps, ConsistencyOptions::default())?;
    println!(
        "eps = {eps:.1e}: measured rate {:.3}, predicted {:.3}, duhamel mismatch {:.2e}",
        r.gamma, r.predicted_rate, r.duhamel_mismatch
    );
    let step = (r.xs.len() / 20).max(1);
    for i in (0..r.xs.len()).step_by(step) {
        println!("  x = {:.4}: predicted {:.4e}, norm/predicted {:.4}", r.xs[i], r.predicted_amp[i], r.amp_ratio[i]);
    }
    let (lo, hi) = r.amp_ratio_range();
    println!("norm/predicted in [{lo:.4}, {hi:.4}]");
    Ok(())
}
