use num_complex::Complex64;

use crate::base_flow::BaseFlow;
use crate::error::{Error, Result};
use crate::numerics::diff::fd_weights;
use crate::numerics::quad::cumulative_trapezoid;
use crate::numerics::{GridFn, YGrid};

type C64 = Complex64;

/// Relative size of `R(0)` tolerated before the wall identity is declared
/// violated.
pub const COMPAT_TOL: f64 = 1e-10;

/// `u₀(x, ·)` and `∂ᵧu₀(x, ·)` on a y-grid.
#[derive(Debug, Clone)]
pub struct FlowSlice {
    pub ygrid: YGrid,
    pub u0: Vec<f64>,
    pub u0y: Vec<f64>,
}

impl FlowSlice {
    pub fn at(flow: &BaseFlow, x: f64, ygrid: &YGrid) -> Self {
        let pts = flow.profile(x, ygrid.nodes());
        Self {
            ygrid: ygrid.clone(),
            u0: pts.iter().map(|p| p.u).collect(),
            u0y: pts.iter().map(|p| p.uy).collect(),
        }
    }

    pub fn new(ygrid: YGrid, u0: Vec<f64>, u0y: Vec<f64>) -> Result<Self> {
        if u0.len() != ygrid.len() || u0y.len() != ygrid.len() {
            return Err(Error::invalid("flow slice length does not match its grid"));
        }
        Ok(Self { ygrid, u0, u0y })
    }

    fn check(&self, r: &GridFn) -> Result<()> {
        if r.nodes() != self.ygrid.nodes() {
            return Err(Error::invalid("transport data and flow slice live on different grids"));
        }
        if self.u0[1..].iter().any(|&u| !(u > 0.0)) {
            return Err(Error::precondition("u0 must be positive above the wall"));
        }
        Ok(())
    }
}

/// `T[w] = u₀w − ∂ᵧu₀ ∫₀ʸ w`, the integral by the trapezoid rule.
pub fn apply_transport(w: &GridFn, slice: &FlowSlice) -> Result<GridFn> {
    if w.nodes() != slice.ygrid.nodes() {
        return Err(Error::invalid("transport data and flow slice live on different grids"));
    }
    let g = cumulative_trapezoid(w.nodes(), w.values());
    let vals = (0..w.len())
        .map(|j| slice.u0[j] * w.values()[j] - slice.u0y[j] * g[j])
        .collect();
    GridFn::new(w.grid().clone(), vals)
}

fn compatibility(r: &GridFn) -> Result<()> {
    let scale = r.max_abs();
    let r0 = r.values()[0].norm();
    if r0 > COMPAT_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Compatibility(format!(
            "R(0) = {r0:.3e} (max |R| = {scale:.3e}); the wall identity forces R(0) = 0"
        )));
    }
    Ok(())
}

/// Solves `u₀w − ∂ᵧu₀ ∫₀ʸ w = R` for `w`.
///
/// Marches the trapezoid-discretized Volterra equation node by node, so the
/// result is the exact inverse of [`apply_transport`]. At the wall `w(0)` is
/// the limit of `R/u₀ + ∂ᵧu₀∫R/u₀²`, which is zero when `R = O(y²)`.
pub fn invert_transport(r: &GridFn, slice: &FlowSlice) -> Result<GridFn> {
    slice.check(r)?;
    compatibility(r)?;
    let ys = r.nodes();
    let rv = r.values();
    let n = ys.len();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut g = C64::new(0.0, 0.0);
    for j in 1..n {
        let h = ys[j] - ys[j - 1];
        let den = slice.u0[j] - 0.5 * h * slice.u0y[j];
        if !(den > 0.0) {
            return Err(Error::precondition(format!(
                "grid too coarse for the transport recurrence at y = {:.4e}",
                ys[j]
            )));
        }
        let carry = g + 0.5 * h * w[j - 1];
        w[j] = (rv[j] + slice.u0y[j] * carry) / den;
        g = carry + 0.5 * h * w[j];
    }
    GridFn::new(r.grid().clone(), w)
}

/// The closed form `w = R/u₀ + ∂ᵧu₀ ∫₀ʸ R/u₀²`, with `R/u₀²` at the wall
/// replaced by its limit `R″(0)/(2λ²)`, `λ = ∂ᵧu₀(0)`. Second-order accurate;
/// used to cross-check [`invert_transport`].
pub fn invert_transport_closed(r: &GridFn, slice: &FlowSlice) -> Result<GridFn> {
    slice.check(r)?;
    compatibility(r)?;
    let ys = r.nodes();
    let rv = r.values();
    let n = ys.len();
    let lambda = slice.u0y[0];
    if !(lambda > 0.0) {
        return Err(Error::precondition("closed-form inversion needs a simple zero of u0 at the wall"));
    }
    let m = n.min(5);
    let wts = fd_weights(0.0, &ys[..m], 2);
    let r2: C64 = wts.iter().zip(rv).map(|(w, v)| *w * v).sum();
    let mut q = Vec::with_capacity(n);
    q.push(r2 / (2.0 * lambda * lambda));
    for j in 1..n {
        q.push(rv[j] / (slice.u0[j] * slice.u0[j]));
    }
    let iq = cumulative_trapezoid(ys, &q);
    let mut w = vec![C64::new(0.0, 0.0); n];
    for j in 1..n {
        w[j] = rv[j] / slice.u0[j] + slice.u0y[j] * iq[j];
    }
    GridFn::new(r.grid().clone(), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_stretched_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn generic_slice(g: &YGrid) -> FlowSlice {
        // u₀ = tanh(2y) + 0.3 y e^{−y}: simple zero at the wall, nonconstant shear.
        let u0 = g.nodes().iter().map(|&y| (2.0 * y).tanh() + 0.3 * y * (-y).exp()).collect();
        let u0y = g
            .nodes()
            .iter()
            .map(|&y| 2.0 / (2.0 * y).cosh().powi(2) + 0.3 * (1.0 - y) * (-y).exp())
            .collect();
        FlowSlice::new(g.clone(), u0, u0y).unwrap()
    }

    fn random_r(g: &YGrid, rng: &mut ChaCha8Rng) -> GridFn {
        let c: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.3..2.0)))
            .collect();
        GridFn::from_fn(g.shared(), |y| {
            let s: C64 = c
                .iter()
                .map(|&(re, im, k)| C64::new(re, im) * (k * y).sin().powi(2) * (-k * y / 2.0).exp())
                .sum();
            s * (-0.5 * y * y).exp()
        })
        .unwrap()
    }

    #[test]
    fn plug_flow_divides() {
        let g = build_stretched_grid(10.0, 201, 2.0).unwrap();
        let slice = FlowSlice::new(g.clone(), vec![2.0; g.len()], vec![0.0; g.len()]).unwrap();
        let r = GridFn::from_fn(g.shared(), |y| C64::new(y * y, -y * y * y)).unwrap();
        let w = invert_transport(&r, &slice).unwrap();
        for (wj, rj) in w.values().iter().zip(r.values()) {
            assert!((wj - rj / 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let g = build_stretched_grid(20.0, 801, 3.0).unwrap();
        let slice = generic_slice(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let r = random_r(&g, &mut rng);
            let w = invert_transport(&r, &slice).unwrap();
            let back = apply_transport(&w, &slice).unwrap();
            let err = (&back - &r).max_abs() / r.max_abs();
            assert!(err < 1e-10, "{err:.3e}");
        }
    }

    #[test]
    fn closed_form_agrees_at_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coarse = build_stretched_grid(12.0, 401, 2.0).unwrap();
        let fine = build_stretched_grid(12.0, 801, 2.0).unwrap();
        let r_c = random_r(&coarse, &mut rng);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r_f = random_r(&fine, &mut rng);
        let d = |g: &YGrid, r: &GridFn| {
            let s = generic_slice(g);
            let a = invert_transport(r, &s).unwrap();
            let b = invert_transport_closed(r, &s).unwrap();
            (&a - &b).max_abs() / a.max_abs()
        };
        let (dc, df) = (d(&coarse, &r_c), d(&fine, &r_f));
        assert!(dc < 1e-3, "{dc:.3e}");
        assert!(dc / df > 3.0, "{dc:.3e} -> {df:.3e}");
    }

    #[test]
    fn nonzero_wall_value_is_incompatible() {
        let g = build_stretched_grid(10.0, 101, 2.0).unwrap();
        let slice = generic_slice(&g);
        let r = GridFn::from_fn(g.shared(), |y| C64::new((-y).exp(), 0.0)).unwrap();
        assert!(matches!(invert_transport(&r, &slice), Err(Error::Compatibility(_))));
        assert!(matches!(invert_transport_closed(&r, &slice), Err(Error::Compatibility(_))));
    }
}
