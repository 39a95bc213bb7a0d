use std::sync::Arc;

use super::*;
use crate::base_flow::CatalogId;
use crate::numerics::norm::weighted_sup;
use crate::quasimode::testing::{flow, shear};

fn bump(g: &YGrid, c: C64, s: f64) -> GridFn {
    GridFn::from_fn(g.shared(), |y| c * y * y * (-s * y).exp()).unwrap()
}

fn rel(a: &GridFn, b: &GridFn) -> f64 {
    (a - b).max_abs() / b.max_abs()
}

#[test]
fn zero_data_stays_zero() {
    let (f, _) = shear();
    let g = mode_grid(1.0, 0.5, 2.0, 20.0, 8.0, 1.05).unwrap();
    let run = ModeRun::new(0.0, f, GridFn::zeros(g.shared()), 0.1, 0.01);
    let ev = march_mode(&run).unwrap();
    assert!(ev.norms.iter().all(|&n| n == 0.0));
}

#[test]
fn march_is_linear() {
    let (f, _) = shear();
    let g = mode_grid(25.0, 0.6, 3.0, 20.0, 8.0, 1.05).unwrap();
    let (a, b) = (C64::new(0.3, -1.2), C64::new(-2.0, 0.5));
    let u1 = bump(&g, C64::new(1.0, 0.0), 1.0);
    let u2 = bump(&g, C64::new(0.0, 1.0), 2.5);
    let go = |u: GridFn| march_mode(&ModeRun::new(25.0, f, u, 0.2, 2e-3)).unwrap().last;
    let combo = go(&u1.scale(a) + &u2.scale(b));
    let parts = &go(u1).scale(a) + &go(u2).scale(b);
    assert!(rel(&combo, &parts) < 1e-11, "{:.3e}", rel(&combo, &parts));
}

#[test]
fn norms_are_homogeneous() {
    let (f, _) = shear();
    let g = mode_grid(25.0, 0.6, 3.0, 20.0, 8.0, 1.05).unwrap();
    let u = bump(&g, C64::new(1.0, 0.0), 1.0);
    let c = C64::new(-3.0, 4.0);
    let e1 = march_mode(&ModeRun::new(25.0, f, u.clone(), 0.1, 2e-3)).unwrap();
    let e2 = march_mode(&ModeRun::new(25.0, f, u.scale(c), 0.1, 2e-3)).unwrap();
    for (n1, n2) in e1.norms.iter().zip(&e2.norms) {
        assert!((n2 - 5.0 * n1).abs() <= 1e-12 * n2);
    }
}

/// Marching to `x₂` in one leg against stopping at `x₁` and restarting. The
/// restart drops to backward Euler for one step, so the legs agree to the
/// local error of that step and the gap shrinks with `Δx`.
#[test]
fn evolution_property_holds_to_scheme_order() {
    let (f, _) = shear();
    let g = mode_grid(25.0, 0.6, 3.0, 20.0, 8.0, 1.05).unwrap();
    let u = bump(&g, C64::new(1.0, 0.5), 1.5);
    let gap = |dx: f64| {
        let one = march_mode(&ModeRun::new(25.0, f, u.clone(), 0.2, dx)).unwrap().last;
        let first = march_mode(&ModeRun::new(25.0, f, u.clone(), 0.1, dx)).unwrap().last;
        let mut run = ModeRun::new(25.0, f, first, 0.2, dx);
        run.start_xi = 0.1;
        let two = march_mode(&run).unwrap().last;
        rel(&two, &one)
    };
    let (g1, g2) = (gap(5e-4), gap(2.5e-4));
    assert!(g1 < 1e-2, "{g1:.3e}");
    assert!(g1 / g2 > 3.0, "{g1:.3e} -> {g2:.3e}");
}

#[test]
fn wall_identity_holds_without_forcing() {
    let (f, _) = shear();
    let defect = |ppl: f64| {
        let g = mode_grid(100.0, 0.6, 3.0, 20.0, ppl, 1.04).unwrap();
        let u = GridFn::from_fn(g.shared(), |y| C64::new(y.powi(3) * (-2.0 * y).exp(), 0.0)).unwrap();
        let mut run = ModeRun::new(100.0, f, u, 0.2, 1e-3);
        run.opts.phase_shift = 4.0 * 100.0;
        march_mode(&run).unwrap().compat_defect
    };
    let (d1, d2) = (defect(8.0), defect(16.0));
    assert!(d1 < 5e-2, "{d1:.3e}");
    assert!(d1 / d2 > 2.5, "{d1:.3e} -> {d2:.3e}");
}

/// The frame rotation changes variables only: results agree with the
/// unrotated march to the accuracy of the scheme.
#[test]
fn phase_shift_is_a_change_of_variables() {
    let (f, _) = shear();
    let g = mode_grid(25.0, 0.6, 3.0, 20.0, 8.0, 1.05).unwrap();
    let u = bump(&g, C64::new(1.0, 0.0), 1.5);
    let plain = march_mode(&ModeRun::new(25.0, f, u.clone(), 0.1, 2.5e-4)).unwrap().last;
    let mut run = ModeRun::new(25.0, f, u, 0.1, 2.5e-4);
    run.opts.phase_shift = 5.0;
    let rotated = march_mode(&run).unwrap().last;
    assert!(rel(&rotated, &plain) < 1e-3, "{:.3e}", rel(&rotated, &plain));
}

/// Manufactured solution `û = e^{λx} y² e^{−y}` on `u₀ = 1 − e^{−y}`:
/// `v̂ = −λe^{λx}G`, `G = 2 − e^{−y}(y² + 2y + 2)`.
#[test]
fn manufactured_solution_converges_at_second_order() {
    let f = flow(CatalogId::MonotoneExp);
    let (k, lam) = (10.0, C64::new(-1.0, 3.0));
    let g = mode_grid(k, 1.0, 4.0, 30.0, 40.0, 1.02).unwrap();
    let shape = |y: f64| y * y * (-y).exp();
    let big_g = |y: f64| 2.0 - (-y).exp() * (y * y + 2.0 * y + 2.0);
    let curv = |y: f64| (2.0 - 4.0 * y + y * y) * (-y).exp();
    let ys = g.nodes().to_vec();
    let forcing: Forcing = Arc::new(move |x: f64| {
        let e = (lam * x).exp();
        Ok(ys
            .iter()
            .map(|&y| {
                let (u0, u0y) = (1.0 - (-y).exp(), (-y).exp());
                e * (-I * k * shape(y) + lam * u0 * shape(y) - lam * big_g(y) * u0y - curv(y))
            })
            .collect())
    });
    let exact = |x: f64| GridFn::from_fn(g.shared(), |y| (lam * x).exp() * shape(y)).unwrap();
    let err = |dx: f64| {
        let mut run = ModeRun::new(k, &f, exact(0.0), 0.5, dx);
        run.forcing = Some(forcing.clone());
        rel(&march_mode(&run).unwrap().last, &exact(0.5))
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!(e1 < 5e-3, "{e1:.3e}");
    assert!(e1 / e2 > 3.2, "{e1:.3e} -> {e2:.3e}");
}

/// With `k = 0` and no forcing, the monotone profile only diffuses and
/// transports, so the `β = 0` sup norm does not grow.
#[test]
fn k_zero_on_monotone_flow_does_not_grow() {
    let f = flow(CatalogId::MonotoneExp);
    let g = mode_grid(1.0, 1.0, 4.0, 30.0, 20.0, 1.03).unwrap();
    let u = bump(&g, C64::new(1.0, 0.0), 1.0);
    let mut run = ModeRun::new(0.0, &f, u, 2.0, 1e-2);
    run.opts.beta = 0.0;
    let ev = march_mode(&run).unwrap();
    assert!(ev.norms.last().unwrap() < &ev.norms[0]);
    assert!(ev.gamma < 0.0);
}

#[test]
fn operator_norm_bound_is_scale_invariant() {
    let (f, _) = shear();
    let g = mode_grid(25.0, 0.6, 3.0, 20.0, 8.0, 1.05).unwrap();
    let trials = vec![bump(&g, C64::new(1.0, 0.0), 1.0), bump(&g, C64::new(0.0, 1.0), 3.0)];
    let scaled: Vec<GridFn> = trials.iter().map(|t| t.scale(C64::new(7.0, 0.0))).collect();
    let opts = MarchOptions::default();
    let b1 = operator_norm_lower_bound(25.0, f, 0.1, 0.0, 2e-3, opts, &trials).unwrap();
    let b2 = operator_norm_lower_bound(25.0, f, 0.1, 0.0, 2e-3, opts, &scaled).unwrap();
    assert!((b1 - b2).abs() < 1e-12 * b1);
    let n0 = weighted_sup(trials[0].nodes(), trials[0].values(), opts.beta);
    assert!(n0 > 0.0);
}

#[test]
fn nonzero_wall_value_is_rejected() {
    let (f, _) = shear();
    let g = mode_grid(1.0, 0.5, 2.0, 20.0, 8.0, 1.05).unwrap();
    let u = GridFn::from_fn(g.shared(), |y| C64::new((-y).exp(), 0.0)).unwrap();
    assert!(march_mode(&ModeRun::new(1.0, f, u, 0.1, 0.01)).is_err());
}
