use serde::{Deserialize, Serialize};

use super::flow::BaseFlow;
use crate::error::{Error, Result};

/// The critical curve `∂ᵧu₀(x, a(x)) = 0` with `μ = |∂²ᵧu₀(x,a)|^{1/2}` and
/// `u_a = u₀(x, a)`, sampled on the flow's x-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurve {
    pub xs: Vec<f64>,
    pub a: Vec<f64>,
    pub mu: Vec<f64>,
    pub ua: Vec<f64>,
    /// `u₀(0, a(0))`, the constant of the spectral condition.
    pub c_spectral: f64,
}

/// State of the curve at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalState {
    pub a: f64,
    pub mu: f64,
    pub ua: f64,
    /// `a′(x) = −∂ₓᵧu₀ / ∂²ᵧu₀`.
    pub da: f64,
}

const POLISH_ITER: usize = 30;

/// Newton on `∂ᵧu₀(x, ·) = 0` from `guess`.
pub fn polish(flow: &BaseFlow, x: f64, guess: f64) -> Result<CriticalState> {
    let mut a = guess;
    let scale = shear_scale(flow, x);
    for _ in 0..POLISH_ITER {
        let p = flow.eval(x, a);
        if !(p.uyy < 0.0) {
            return Err(Error::Tracking {
                last_x: x,
                reason: format!("second derivative {:.3e} is not negative at y = {a:.6}", p.uyy),
            });
        }
        let step = p.uy / p.uyy;
        a -= step;
        if step.abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    let p = flow.eval(x, a);
    if p.uy.abs() > 1e-8 * scale {
        return Err(Error::Tracking {
            last_x: x,
            reason: format!("Newton polish left |u0_y| = {:.3e}", p.uy.abs()),
        });
    }
    if !(p.u > 0.0) {
        return Err(Error::Tracking {
            last_x: x,
            reason: format!("u0 at the critical point is {:.3e}", p.u),
        });
    }
    if !(p.uyy < 0.0) || p.uyy.abs() < 1e-10 * scale {
        return Err(Error::Tracking {
            last_x: x,
            reason: "critical point became degenerate".into(),
        });
    }
    Ok(CriticalState {
        a,
        mu: (-p.uyy).sqrt(),
        ua: p.u,
        da: -p.uxy / p.uyy,
    })
}

fn shear_scale(flow: &BaseFlow, x: f64) -> f64 {
    let i = flow.xgrid.nearest(x);
    flow.du0_dy[i].iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300)
}

/// Marches `a′ = −∂ₓᵧu₀/∂²ᵧu₀` across the x-grid (Heun predictor) and
/// polishes each node with Newton.
pub fn critical_point_curve(flow: &BaseFlow, a0: f64) -> Result<CriticalCurve> {
    let p = flow.eval(0.0, a0);
    let scale = shear_scale(flow, 0.0);
    if !(p.uyy < 0.0) || p.uy.abs() > 1e-6 * scale {
        return Err(Error::precondition(format!(
            "a0 = {a0} is not a non-degenerate critical point (u0_y = {:.3e}, u0_yy = {:.3e})",
            p.uy, p.uyy
        )));
    }
    let xs = flow.xgrid.nodes().to_vec();
    let mut states = vec![polish(flow, xs[0], a0)?];
    for w in xs.windows(2) {
        let prev = *states.last().expect("nonempty");
        let h = w[1] - w[0];
        let predictor = prev.a + h * prev.da;
        let slope_end = {
            let q = flow.eval(w[1], predictor);
            -q.uxy / q.uyy
        };
        let guess = prev.a + 0.5 * h * (prev.da + slope_end);
        let st = polish(flow, w[1], guess).map_err(|e| match e {
            Error::Tracking { reason, .. } => Error::Tracking {
                last_x: w[0],
                reason,
            },
            e => e,
        })?;
        states.push(st);
    }
    Ok(CriticalCurve {
        c_spectral: states[0].ua,
        a: states.iter().map(|s| s.a).collect(),
        mu: states.iter().map(|s| s.mu).collect(),
        ua: states.iter().map(|s| s.ua).collect(),
        xs,
    })
}

impl CriticalCurve {
    /// State at an arbitrary `x`: linear guess from the samples, then Newton.
    pub fn state_at(&self, flow: &BaseFlow, x: f64) -> Result<CriticalState> {
        let guess = crate::numerics::interp::linear(&self.xs, &self.a, x);
        polish(flow, x, guess)
    }
}

/// First local maximum of `u₀(0, ·)` found by a sign-change scan.
pub fn find_critical_point(flow: &BaseFlow) -> Result<f64> {
    let ys = flow.ygrid.nodes();
    let uy = &flow.du0_dy[0];
    for j in 1..ys.len() {
        if uy[j - 1] > 0.0 && uy[j] <= 0.0 {
            let guess = ys[j - 1] + (ys[j] - ys[j - 1]) * uy[j - 1] / (uy[j - 1] - uy[j]);
            return polish(flow, 0.0, guess).map(|s| s.a);
        }
    }
    Err(Error::precondition(format!(
        "flow `{}` has no critical point with negative curvature at x = 0",
        flow.name
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_flow::catalog::{analytic_profile, CatalogId, CatalogParams};
    use crate::numerics::{build_stretched_grid, XGrid};

    fn flow(id: CatalogId, p: CatalogParams) -> BaseFlow {
        analytic_profile(
            id,
            p,
            XGrid::uniform(1.0, 21).unwrap(),
            build_stretched_grid(30.0, 600, 2.0).unwrap(),
        )
        .unwrap()
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn x_independent_curve_is_constant() {
        let f = flow(CatalogId::CriticalShear, CatalogParams::default());
        let a0 = find_critical_point(&f).unwrap();
        let c = critical_point_curve(&f, a0).unwrap();
        assert!(c.a.iter().all(|&a| (a - a0).abs() < 1e-12));
        assert!(c.c_spectral > 0.0);
    }

    #[test]
    fn x_dependent_curve_matches_bisection() {
        let f = flow(CatalogId::CriticalXdep, CatalogParams::default());
        let a0 = find_critical_point(&f).unwrap();
        let c = critical_point_curve(&f, a0).unwrap();
        assert!((c.a[c.a.len() - 1] - c.a[0]).abs() > 1e-3);
        for (i, &x) in c.xs.iter().enumerate() {
            let root = bisect(|y| f.eval(x, y).uy, 0.05, 1.0);
            assert!((c.a[i] - root).abs() < 1e-8, "x={x}: {} vs {root}", c.a[i]);
            let p = f.eval(x, c.a[i]);
            assert!(p.uy.abs() <= 1e-8 * shear_scale(&f, x));
        }
    }

    #[test]
    fn non_critical_start_is_rejected() {
        let f = flow(CatalogId::CriticalShear, CatalogParams::default());
        assert!(matches!(critical_point_curve(&f, 2.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_amplitude_xdep_reduces_to_shear() {
        let p = CatalogParams {
            a_slope: 0.0,
            ..Default::default()
        };
        let f = flow(CatalogId::CriticalXdep, p);
        let a0 = find_critical_point(&f).unwrap();
        let c = critical_point_curve(&f, a0).unwrap();
        assert!(c.a.iter().all(|&a| (a - a0).abs() < 1e-12));
    }
}
