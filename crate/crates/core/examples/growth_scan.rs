//! High-frequency growth scan: marches the quasimode data of critical_shear
//! at k = 100, 400, 1600 on critical_shear and on the monotone control, and
//! fits γ(k) against √k.
//!
//! `cargo run --example growth_scan`

use prandtl_lab::base_flow::{analytic_profile, find_critical_point, CatalogId, CatalogParams};
use prandtl_lab::evolution::{illposedness_scan, QuasimodeData, ScanConfig};
use prandtl_lab::numerics::{build_stretched_grid, XGrid};
use prandtl_lab::quasimode::QuasimodeConfig;
use prandtl_lab::spectral::{solve_spectral, SpectralConfig};

fn main() -> prandtl_lab::Result<()> {
    let build = |id| analytic_profile(id, CatalogParams::default(), XGrid::uniform(1.0, 41)?, build_stretched_grid(40.0, 801, 3.0)?);
    let shear = build(CatalogId::CriticalShear)?;
    let control = build(CatalogId::MonotoneExp)?;
    let a = find_critical_point(&shear)?;
    let spec = solve_spectral(shear.eval(0.0, a).u, &SpectralConfig::default())?;
    let template = QuasimodeConfig::new(1e-2);
    let data = QuasimodeData {
        flow: &shear,
        spec: &spec,
        template: &template,
    };
    let cfg = ScanConfig::default();
    for flow in [&shear, &control] {
        let r = illposedness_scan(&cfg, flow, &data)?;
        println!("{}: slope {:.4}, r2 {:.4}", r.flow, r.slope, r.r_squared);
        for row in &r.rows {
            println!("  k = {:>6}: gamma {:>9.3}, gamma/sqrt(k) {:>7.4}, growth over window {:.3e}", row.k, row.gamma, row.gamma_over_sqrt_k, row.end_ratio);
        }
        for v in &r.verdicts {
            println!("  delta {:.4}: regularized sups {:?}, grows {}", v.delta, v.sups, v.grows);
        }
        println!("  ill-posed signature: {}", r.ill_posed_signature);
    }
    Ok(())
}
