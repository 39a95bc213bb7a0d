//! One x-step of the single-mode equation.
//!
//! Unknowns are `ũ` and `F = ∫₀ʸ ũ` on the y-grid, interleaved as
//! `[ũ₀, F₀, ũ₁, F₁, …]`. Writing `v̂ = −∂ₓF` turns
//! `u₀∂ₓû − ∂ᵧu₀ ∂ₓF = ikû − v₀∂ᵧû − ∂ₓu₀ û + ∂²ᵧû + f`
//! into a banded system (three sub-, two super-diagonals) per step. The march
//! runs on `ũ = e^{−iθx}û` for a fixed frame rotation `θ`.

use num_complex::Complex64;

use crate::base_flow::BaseFlow;
use crate::error::{Error, Result};
use crate::numerics::diff::fd_weights;
use crate::numerics::{BandLu, BandMatrix, YGrid};

type C64 = Complex64;
const I: C64 = C64::new(0.0, 1.0);

/// Coefficients of the base flow on the march grid at one x.
#[derive(Debug, Clone)]
pub(crate) struct Coeffs {
    pub u0: Vec<f64>,
    pub u0y: Vec<f64>,
    pub u0x: Vec<f64>,
    pub v0: Vec<f64>,
}

impl Coeffs {
    pub fn at(flow: &BaseFlow, x: f64, ys: &[f64]) -> Result<Self> {
        let pts = flow.profile(x, ys);
        if let Some(j) = (1..ys.len()).find(|&j| !(pts[j].u > 0.0)) {
            return Err(Error::precondition(format!(
                "u0({x:.4e}, {:.4e}) = {:.3e}: the march needs u0 > 0 above the wall",
                ys[j], pts[j].u
            )));
        }
        Ok(Self {
            u0: pts.iter().map(|p| p.u).collect(),
            u0y: pts.iter().map(|p| p.uy).collect(),
            u0x: pts.iter().map(|p| p.ux).collect(),
            v0: pts.iter().map(|p| p.v).collect(),
        })
    }
}

/// Backward-difference weights `∂ₓq ≈ a₀qⁿ⁺¹ + a₁qⁿ + a₂qⁿ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bdf {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Bdf {
    pub fn euler(dx: f64) -> Self {
        Self { a0: 1.0 / dx, a1: -1.0 / dx, a2: 0.0 }
    }

    pub fn second(dx: f64) -> Self {
        Self { a0: 1.5 / dx, a1: -2.0 / dx, a2: 0.5 / dx }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Stepper {
    pub k: f64,
    pub theta: f64,
    ys: Vec<f64>,
    d1: Vec<[f64; 3]>,
    d2: Vec<[f64; 3]>,
}

impl Stepper {
    pub fn new(k: f64, theta: f64, grid: &YGrid) -> Self {
        let ys = grid.nodes().to_vec();
        let n = ys.len();
        let mut d1 = vec![[0.0; 3]; n];
        let mut d2 = vec![[0.0; 3]; n];
        for j in 1..n - 1 {
            let w1 = fd_weights(ys[j], &ys[j - 1..=j + 1], 1);
            let w2 = fd_weights(ys[j], &ys[j - 1..=j + 1], 2);
            d1[j] = [w1[0], w1[1], w1[2]];
            d2[j] = [w2[0], w2[1], w2[2]];
        }
        Self { k, theta, ys, d1, d2 }
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn matrix(&self, c: &Coeffs, bdf: Bdf) -> Result<BandLu> {
        let n = self.len();
        let mut m = BandMatrix::new(2 * n, 3, 2);
        let one = C64::new(1.0, 0.0);
        m.set(0, 0, one);
        m.set(1, 1, one);
        for j in 1..n {
            let (u, f) = (2 * j, 2 * j + 1);
            let h = self.ys[j] - self.ys[j - 1];
            m.set(f, f, one);
            m.set(f, f - 2, -one);
            m.set(f, u, C64::new(-0.5 * h, 0.0));
            m.set(f, u - 2, C64::new(-0.5 * h, 0.0));
            if j == n - 1 {
                m.set(u, u, one);
                continue;
            }
            let [l1, c1, r1] = self.d1[j];
            let [l2, c2, r2] = self.d2[j];
            let v0 = c.v0[j];
            let diag = bdf.a0 * c.u0[j] - I * (self.k - self.theta * c.u0[j]) + c.u0x[j] + v0 * c1 - c2;
            m.set(u, u, diag);
            m.set(u, u - 2, C64::new(v0 * l1 - l2, 0.0));
            m.set(u, u + 2, C64::new(v0 * r1 - r2, 0.0));
            m.set(u, f, -(bdf.a0 + I * self.theta) * c.u0y[j]);
        }
        m.factor()
    }

    /// Right-hand side from the two previous levels (`prev2` unused by Euler).
    pub fn rhs(&self, c: &Coeffs, bdf: Bdf, prev: &[C64], prev2: &[C64], forcing: Option<&[C64]>) -> Vec<C64> {
        let n = self.len();
        let mut b = vec![C64::new(0.0, 0.0); 2 * n];
        for j in 1..n - 1 {
            let (u, f) = (2 * j, 2 * j + 1);
            let mut hist_u = bdf.a1 * prev[u];
            let mut hist_f = bdf.a1 * prev[f];
            if bdf.a2 != 0.0 {
                hist_u += bdf.a2 * prev2[u];
                hist_f += bdf.a2 * prev2[f];
            }
            b[u] = -c.u0[j] * hist_u + c.u0y[j] * hist_f;
            if let Some(g) = forcing {
                b[u] += g[j];
            }
        }
        b
    }

    /// One-sided `∂²ᵧ` at the wall from the first four nodes.
    pub fn wall_curvature(&self, u: &[C64]) -> C64 {
        let m = self.len().min(4);
        let w = fd_weights(0.0, &self.ys[..m], 2);
        w.iter().zip(u).map(|(w, v)| *w * v).sum()
    }

    /// `max_j |∂²ᵧu|` over interior nodes.
    pub fn max_curvature(&self, u: &[C64]) -> f64 {
        (1..self.len() - 1)
            .map(|j| {
                let [l, c, r] = self.d2[j];
                (l * u[j - 1] + c * u[j] + r * u[j + 1]).norm()
            })
            .fold(0.0, f64::max)
    }
}
