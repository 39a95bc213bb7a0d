//! Residual and growth bounds of the quasimode on the ε ladder.
//!
//! `cargo run --example quasimode_residual [eps ...]`

use prandtl_lab::base_flow::{analytic_profile, find_critical_point, CatalogId, CatalogParams};
use prandtl_lab::numerics::{build_stretched_grid, XGrid};
use prandtl_lab::quasimode::{residual_bound_check, QuasimodeConfig};
use prandtl_lab::spectral::{solve_spectral, SpectralConfig};

fn main() -> prandtl_lab::Result<()> {
    let eps_list: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("eps must be a number"))
        .collect();
    let eps_list = if eps_list.is_empty() { vec![1e-2, 2.5e-3, 1e-3] } else { eps_list };

    let flow = analytic_profile(
        CatalogId::CriticalShear,
        CatalogParams::default(),
        XGrid::uniform(1.0, 41)?,
        build_stretched_grid(40.0, 801, 3.0)?,
    )?;
    let a = find_critical_point(&flow)?;
    let c = flow.eval(0.0, a).u;
    let spec = solve_spectral(c, &SpectralConfig::default())?;
    println!("critical point a = {a:.6}, C = {c:.6}, tau = {:.8}", spec.tau);

    println!(
        "{:>9} {:>11} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "eps", "bound_C", "d0_eff", "d0_lead", "lower", "upper", "s0_min", "s0_max", "direct"
    );
    for eps in eps_list {
        let r = residual_bound_check(&QuasimodeConfig::new(eps), &flow, &spec)?;
        println!(
            "{:>9.2e} {:>11.4e} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.2e}",
            eps,
            r.bound_constant,
            r.delta0_effective,
            r.delta0_leading,
            r.sandwich.lower_const,
            r.sandwich.upper_const,
            r.sandwich.s0_min,
            r.sandwich.s0_max,
            r.max_direct_defect
        );
        let row = &r.rows[0];
        println!(
            "          parts at x=0: I1 {:.3e} I2 {:.3e} I31 {:.3e} I32 {:.3e} I33 {:.3e} I34 {:.3e}",
            row.i1, row.i2, row.i31, row.i32, row.i33, row.i34
        );
    }
    Ok(())
}
