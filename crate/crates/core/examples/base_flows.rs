//! The catalog base flows: critical points, the critical curve of the
//! x-dependent flow and the steady-equation diagnostics. The analytic
//! profiles are not steady solutions, so the steady residual is the forcing
//! they would need.
//!
//! `cargo run --example base_flows`

use prandtl_lab::base_flow::{
    analytic_profile, critical_point_curve, find_critical_point, validate_baseflow, CatalogId, CatalogParams,
};
use prandtl_lab::numerics::{build_stretched_grid, XGrid};

fn main() -> prandtl_lab::Result<()> {
    for id in [CatalogId::MonotoneExp, CatalogId::CriticalShear, CatalogId::CriticalXdep] {
        let flow = analytic_profile(id, CatalogParams::default(), XGrid::uniform(1.0, 41)?, build_stretched_grid(40.0, 801, 3.0)?)?;
        let d = validate_baseflow(&flow);
        println!(
            "{}: steady residual {:.2e}, no-slip {:.1e}, far field {:.1e}, min shear {:.4}",
            flow.name, d.steady_residual, d.no_slip, d.far_field, d.min_shear
        );
        match find_critical_point(&flow) {
            Ok(a) => {
                let p = flow.eval(0.0, a);
                println!("  critical point a = {a:.6}, u0 = {:.6}, u0_yy = {:.6}", p.u, p.uyy);
                let curve = critical_point_curve(&flow, a)?;
                for i in (0..curve.xs.len()).step_by(10) {
                    println!(
                        "  x = {:.2}: a = {:.6}, mu = {:.6}, u_a = {:.6}",
                        curve.xs[i], curve.a[i], curve.mu[i], curve.ua[i]
                    );
                }
            }
            Err(e) => println!("  no critical point: {e}"),
        }
    }
    Ok(())
}
