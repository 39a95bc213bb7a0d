use serde::{Deserialize, Serialize};

use super::flow::BaseFlow;
use crate::numerics::quad::cumulative_trapezoid_real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct V0Recovery {
    /// Row per x-node.
    pub v0: Vec<Vec<f64>>,
    /// `∂ₓu₀` does not decay at the top, so `v₀` grows like `y`.
    pub linear_growth: bool,
}

/// `v₀ = −∫₀^y ∂ₓu₀ dy′` at every x-node.
pub fn recover_v0(ys: &[f64], du0_dx: &[Vec<f64>]) -> V0Recovery {
    let mut linear_growth = false;
    let v0 = du0_dx
        .iter()
        .map(|row| {
            let scale = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale > 0.0 && row[row.len() - 1].abs() > 1e-6 * scale {
                linear_growth = true;
            }
            cumulative_trapezoid_real(ys, row).into_iter().map(|s| -s).collect()
        })
        .collect();
    V0Recovery { v0, linear_growth }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowDiagnostics {
    /// Max of `|u₀∂ₓu₀ + v₀∂ᵧu₀ + p_x − ∂²ᵧu₀|` over the grid.
    pub steady_residual: f64,
    pub no_slip: f64,
    /// Max of `|v₀ + ∫₀^y ∂ₓu₀|`.
    pub incompressibility: f64,
    pub far_field: f64,
    /// Min of `∂ᵧu₀` over `0 < y ≤ y_max/2`; reported for monotone flows.
    pub min_shear: f64,
}

pub fn validate_baseflow(flow: &BaseFlow) -> FlowDiagnostics {
    let ys = flow.ygrid.nodes();
    let ny = ys.len();
    let v_ref = recover_v0(ys, &flow.du0_dx).v0;
    let mut d = FlowDiagnostics {
        steady_residual: 0.0,
        no_slip: 0.0,
        incompressibility: 0.0,
        far_field: 0.0,
        min_shear: f64::INFINITY,
    };
    for (i, &x) in flow.xgrid.nodes().iter().enumerate() {
        let px = flow.p_x(x);
        for j in 0..ny {
            let r = flow.u0[i][j] * flow.du0_dx[i][j] + flow.v0[i][j] * flow.du0_dy[i][j] + px
                - flow.d2u0_dy2[i][j];
            d.steady_residual = d.steady_residual.max(r.abs());
            d.incompressibility = d.incompressibility.max((flow.v0[i][j] - v_ref[i][j]).abs());
            if j > 0 && ys[j] <= 0.5 * ys[ny - 1] {
                d.min_shear = d.min_shear.min(flow.du0_dy[i][j]);
            }
        }
        d.no_slip = d.no_slip.max(flow.u0[i][0].abs()).max(flow.v0[i][0].abs());
        d.far_field = d.far_field.max((flow.u0[i][ny - 1] - flow.u_far(x)).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_flow::catalog::{analytic_profile, CatalogId, CatalogParams};
    use crate::base_flow::mises::{blasius, invert_von_mises, von_mises_march, MisesResolution};
    use crate::numerics::{build_stretched_grid, XGrid};

    fn ys() -> Vec<f64> {
        (0..=1000).map(|j| j as f64 * 0.02).collect()
    }

    #[test]
    fn zero_streamwise_change_gives_zero_v() {
        let r = recover_v0(&ys(), &[vec![0.0; 1001]]);
        assert!(r.v0[0].iter().all(|&v| v == 0.0));
        assert!(!r.linear_growth);
    }

    #[test]
    fn exponential_ux_gives_bounded_v() {
        let y = ys();
        let ux: Vec<f64> = y.iter().map(|&y| (-y).exp()).collect();
        let r = recover_v0(&y, &[ux]);
        for (j, &yy) in y.iter().enumerate() {
            assert!((r.v0[0][j] - ((-yy).exp() - 1.0)).abs() < 1e-4);
        }
        assert!(!r.linear_growth);
    }

    #[test]
    fn constant_ux_grows_linearly() {
        let y = ys();
        let r = recover_v0(&y, &[vec![0.3; y.len()]]);
        assert!((r.v0[0][500] + 0.3 * y[500]).abs() < 1e-12);
        assert!(r.linear_growth);
    }

    #[test]
    fn catalog_flow_is_consistent() {
        let f = analytic_profile(
            CatalogId::CriticalXdep,
            CatalogParams::default(),
            XGrid::uniform(1.0, 5).unwrap(),
            build_stretched_grid(40.0, 4000, 2.0).unwrap(),
        )
        .unwrap();
        let d = validate_baseflow(&f);
        assert!(d.no_slip < 1e-15);
        assert!(d.incompressibility < 1e-5, "{d:?}");
        assert!(d.far_field < 1e-12);
    }

    #[test]
    fn perturbed_v_shows_in_defect() {
        let mut f = analytic_profile(
            CatalogId::CriticalShear,
            CatalogParams::default(),
            XGrid::uniform(1.0, 3).unwrap(),
            build_stretched_grid(30.0, 300, 2.0).unwrap(),
        )
        .unwrap();
        f.v0[1][100] += 0.25;
        let d = validate_baseflow(&f);
        assert!((d.incompressibility - 0.25).abs() < 1e-12);
    }

    #[test]
    fn steady_residual_falls_under_refinement() {
        let b = blasius(14.0, 1e-3);
        let bc = b.inflow(1.0, 14.0, 2e-3, 1.0).unwrap();
        let residual = |n_psi: usize, n_slices: usize| {
            let mf = von_mises_march(
                &bc,
                8.0,
                MisesResolution {
                    n_psi,
                    n_slices,
                    ..Default::default()
                },
            )
            .unwrap();
            let flow = invert_von_mises(&mf, 2 * n_psi / 3).unwrap();
            validate_baseflow(&flow).steady_residual
        };
        let (r1, r2) = (residual(150, 11), residual(300, 21));
        assert!(r2 < 0.6 * r1, "{r1:e} -> {r2:e}");
    }

    #[test]
    fn monotone_flow_keeps_positive_shear() {
        let f = analytic_profile(
            CatalogId::MonotoneExp,
            CatalogParams::default(),
            XGrid::uniform(1.0, 3).unwrap(),
            build_stretched_grid(30.0, 300, 2.0).unwrap(),
        )
        .unwrap();
        assert!(validate_baseflow(&f).min_shear > 0.0);
    }
}
