//! Steady Prandtl flow through the von Mises variables `ω(ξ, ψ) = u²`,
//! which satisfy `√ω ∂²_ψω − ∂_ξω − 2p_ξ = 0`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::flow::{BaseFlow, SampledField};
use super::steady::{check_oleinik_conditions, SteadyBC};
use crate::error::{Error, Result};
use crate::numerics::quad::cumulative_trapezoid_real;
use crate::numerics::{interp, BandMatrix, XGrid, YGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MisesResolution {
    pub n_psi: usize,
    /// `Δξ = dxi_factor · Δψ² / max √ω`.
    pub dxi_factor: f64,
    /// Number of stored ξ-slices (including both ends).
    pub n_slices: usize,
    /// Relative tolerance on negative `ω` before a step is rejected.
    pub neg_tol: f64,
}

impl Default for MisesResolution {
    fn default() -> Self {
        Self {
            n_psi: 400,
            dxi_factor: 0.25,
            n_slices: 11,
            neg_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MisesField {
    pub xi_grid: XGrid,
    pub psi: Vec<f64>,
    /// Row `i` is `ω(ξ_i, ·)`.
    pub omega: Vec<Vec<f64>>,
    pub p_x: f64,
    /// First ξ at which the wall slope `∂_ψω(ξ, 0)` fell below 1e−3 of its
    /// inflow value.
    pub separated_at: Option<f64>,
    pub steps: usize,
}

/// `ω₁(ψ)` from `ω₁(∫₀^Y u₁) = u₁(Y)²` on a uniform ψ-grid.
pub fn inflow_omega(bc: &SteadyBC, psi: &[f64]) -> Vec<f64> {
    let stream = cumulative_trapezoid_real(&bc.y, &bc.u1);
    let far = bc.u1[bc.u1.len() - 1];
    psi.iter()
        .map(|&p| {
            if p >= stream[stream.len() - 1] {
                far * far
            } else {
                let y = interp::linear(&stream, &bc.y, p);
                let u = interp::linear(&bc.y, &bc.u1, y);
                u * u
            }
        })
        .collect()
}

/// Semi-implicit march: `√ω` frozen from the previous slice, `∂²_ψ`
/// implicit, `2p_ξ` explicit.
pub fn von_mises_march(bc: &SteadyBC, psi_max: f64, res: MisesResolution) -> Result<MisesField> {
    let report = check_oleinik_conditions(bc);
    if !report.all_passed() {
        let names: Vec<_> = report.failed().iter().map(|c| c.name.clone()).collect();
        return Err(Error::precondition(format!(
            "inflow violates the Oleinik conditions: {}",
            names.join(", ")
        )));
    }
    march_unchecked(bc, psi_max, res)
}

/// The march without the Oleinik gate (diagnostic runs).
pub fn march_unchecked(bc: &SteadyBC, psi_max: f64, res: MisesResolution) -> Result<MisesField> {
    if !(psi_max > 0.0) || res.n_psi < 8 || res.n_slices < 2 {
        return Err(Error::invalid("von Mises march needs psi_max > 0, n_psi >= 8, n_slices >= 2"));
    }
    let n = res.n_psi + 1;
    let dpsi = psi_max / res.n_psi as f64;
    let psi: Vec<f64> = (0..n).map(|j| j as f64 * dpsi).collect();
    let mut w = inflow_omega(bc, &psi);
    if w[0].abs() > 1e-14 * w[n - 1].abs() {
        return Err(Error::precondition("inflow omega is nonzero at the wall"));
    }
    let u_max = (0..=100)
        .map(|k| (bc.u_far)(bc.x_end * k as f64 / 100.0))
        .chain(w.iter().map(|v| v.max(0.0).sqrt()))
        .fold(0.0, f64::max);
    let dxi_max = res.dxi_factor * dpsi * dpsi / u_max.max(1e-12);
    let steps = (bc.x_end / dxi_max).ceil() as usize;
    let steps = steps.div_ceil(res.n_slices - 1) * (res.n_slices - 1);
    let dxi = bc.x_end / steps as f64;
    let store_every = steps / (res.n_slices - 1);
    let wall_slope0 = w[1] / dpsi;
    let ceiling = w.iter().cloned().fold(0.0, f64::max);

    let mut omega = vec![w.clone()];
    let mut separated_at = None;
    let r = dxi / (dpsi * dpsi);
    for step in 1..=steps {
        let xi = step as f64 * dxi;
        let top = (bc.u_far)(xi).powi(2);
        let px = (bc.p_x)(xi);
        let mut m = BandMatrix::new(n, 1, 1);
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        m.set(0, 0, Complex64::new(1.0, 0.0));
        m.set(n - 1, n - 1, Complex64::new(1.0, 0.0));
        rhs[n - 1] = Complex64::new(top, 0.0);
        for j in 1..n - 1 {
            let s = w[j].max(0.0).sqrt() * r;
            m.set(j, j - 1, Complex64::new(-s, 0.0));
            m.set(j, j, Complex64::new(1.0 + 2.0 * s, 0.0));
            m.set(j, j + 1, Complex64::new(-s, 0.0));
            rhs[j] = Complex64::new(w[j] - 2.0 * dxi * px, 0.0);
        }
        let sol = m.factor()?.solve(&rhs);
        let scale = ceiling.max(top);
        for j in 0..n {
            let v = sol[j].re;
            if v < -res.neg_tol * scale {
                return Err(Error::Stability {
                    at: xi,
                    reason: format!("omega = {v:.3e} at psi = {:.4}; reduce the xi step", psi[j]),
                });
            }
            w[j] = v.max(0.0);
        }
        if separated_at.is_none() && w[1] / dpsi < 1e-3 * wall_slope0 {
            separated_at = Some(xi);
        }
        if step % store_every == 0 {
            omega.push(w.clone());
        }
        if separated_at.is_some() {
            break;
        }
    }
    let xs: Vec<f64> = (0..omega.len()).map(|i| (i * store_every) as f64 * dxi).collect();
    Ok(MisesField {
        xi_grid: XGrid::from_nodes(xs)?,
        psi,
        omega,
        p_x: (bc.p_x)(0.0),
        separated_at,
        steps,
    })
}

/// `Y(ψ) = ∫₀^ψ dψ′/√ω`, with the first cell integrated exactly for
/// `ω = c₁ψ + c₂ψ²` fitted through the first two interior nodes.
pub fn height_of_streamlines(psi: &[f64], omega: &[f64]) -> Result<Vec<f64>> {
    let n = psi.len();
    if omega[0].abs() > 1e-12 * omega[n - 1].abs().max(1e-300) {
        return Err(Error::invalid("omega must vanish at the wall"));
    }
    if let Some(j) = (1..n).find(|&j| !(omega[j] > 0.0)) {
        return Err(Error::invalid(format!("omega is not positive at psi = {}", psi[j])));
    }
    let (p1, p2) = (psi[1], psi[2]);
    let (w1, w2) = (omega[1], omega[2]);
    let det = p1 * p2 * p2 - p2 * p1 * p1;
    let c1 = (w1 * p2 * p2 - w2 * p1 * p1) / det;
    let c2 = (p1 * w2 - p2 * w1) / det;
    let first = if c1 > 0.0 {
        let t = c2 * p1 / c1;
        if c2.abs() < 1e-12 * c1 / p1 {
            2.0 * (p1 / c1).sqrt()
        } else if c2 > 0.0 {
            2.0 / c2.sqrt() * t.sqrt().asinh()
        } else {
            2.0 / (-c2).sqrt() * (-t).sqrt().min(1.0).asin()
        }
    } else {
        2.0 * p1 / w1.sqrt()
    };
    let mut y = vec![0.0, first];
    for j in 2..n {
        let du = omega[j - 1].sqrt() + omega[j].sqrt();
        y.push(y[j - 1] + 2.0 * (psi[j] - psi[j - 1]) / du);
    }
    Ok(y)
}

/// Back to physical variables on a uniform y-grid with `ny` nodes; `v₀`
/// follows from incompressibility.
pub fn invert_von_mises(mf: &MisesField, ny: usize) -> Result<BaseFlow> {
    let mut heights = Vec::with_capacity(mf.omega.len());
    for w in &mf.omega {
        heights.push(height_of_streamlines(&mf.psi, w)?);
    }
    let y_max = heights
        .iter()
        .map(|h| h[h.len() - 1])
        .fold(f64::INFINITY, f64::min);
    let ys: Vec<f64> = (0..ny).map(|j| y_max * j as f64 / (ny - 1) as f64).collect();
    let u: Vec<Vec<f64>> = mf
        .omega
        .iter()
        .zip(&heights)
        .map(|(w, h)| {
            let us: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
            ys.iter().map(|&y| lagrange4(h, &us, y)).collect()
        })
        .collect();
    let field = SampledField::new(mf.xi_grid.nodes().to_vec(), ys.clone(), u, mf.p_x)?;
    // Steady layers approach U like e^{−cY²}, so any exponential weight is
    // admissible; 1 is the nominal value.
    Ok(BaseFlow::from_field(
        "von_mises",
        Arc::new(field),
        mf.xi_grid.clone(),
        YGrid::from_nodes(ys)?,
        1.0,
    ))
}

fn lagrange4(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let j = xs.partition_point(|&t| t <= x).clamp(1, n - 1) - 1;
    let s = j.saturating_sub(1).min(n - 4);
    let mut acc = 0.0;
    for a in s..s + 4 {
        let mut l = 1.0;
        for b in s..s + 4 {
            if a != b {
                l *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += l * ys[a];
    }
    acc
}

/// Blasius similarity profile `f‴ + ½ff″ = 0`, `f(0) = f′(0) = 0`,
/// `f′(∞) = 1`, by shooting on `f″(0)`.
#[derive(Debug, Clone)]
pub struct Blasius {
    pub wall_curvature: f64,
    pub eta: Vec<f64>,
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
}

fn blasius_rk4(k: f64, eta_max: f64, h: f64) -> (Vec<f64>, Vec<[f64; 3]>) {
    let rhs = |s: [f64; 3]| [s[1], s[2], -0.5 * s[0] * s[2]];
    let steps = (eta_max / h).round() as usize;
    let mut s = [0.0, 0.0, k];
    let mut eta = vec![0.0];
    let mut out = vec![s];
    for i in 0..steps {
        let k1 = rhs(s);
        let add = |a: [f64; 3], b: [f64; 3], c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
        let k2 = rhs(add(s, k1, h / 2.0));
        let k3 = rhs(add(s, k2, h / 2.0));
        let k4 = rhs(add(s, k3, h));
        for d in 0..3 {
            s[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        eta.push((i + 1) as f64 * h);
        out.push(s);
    }
    (eta, out)
}

pub fn blasius(eta_max: f64, h: f64) -> Blasius {
    let end = |k: f64| blasius_rk4(k, eta_max, h).1.last().expect("nonempty")[1] - 1.0;
    let (mut lo, mut hi) = (0.1, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if end(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let (eta, states) = blasius_rk4(k, eta_max, h);
    Blasius {
        wall_curvature: k,
        f: states.iter().map(|s| s[0]).collect(),
        fp: states.iter().map(|s| s[1]).collect(),
        eta,
    }
}

impl Blasius {
    /// `f′(η)`, equal to 1 beyond the integration range.
    pub fn fp_at(&self, eta: f64) -> f64 {
        if eta >= self.eta[self.eta.len() - 1] {
            1.0
        } else {
            interp::linear(&self.eta, &self.fp, eta)
        }
    }

    /// `u(x, Y) = f′(Y/√(x + x₀))` for unit far field and viscosity.
    pub fn u(&self, x: f64, y: f64, x0: f64) -> f64 {
        self.fp_at(y / (x + x0).sqrt())
    }

    /// Inflow data at `x = 0` for virtual origin `x₀`.
    pub fn inflow(&self, x0: f64, y_max: f64, dy: f64, x_end: f64) -> Result<SteadyBC> {
        let n = (y_max / dy).round() as usize;
        let y: Vec<f64> = (0..=n).map(|j| j as f64 * dy).collect();
        let u = y.iter().map(|&y| self.u(0.0, y, x0)).collect();
        SteadyBC::with_constant_pressure(y, u, 0.0, x_end)
    }
}

/// Blasius inflow (virtual origin 1, unit far field) marched to `x = 1`
/// and mapped back to `(x, Y)`, with the max error against the similarity
/// solution. The profile is bounded by 1, so the error is also relative.
#[derive(Debug, Clone)]
pub struct BlasiusCheck {
    pub flow: BaseFlow,
    pub max_error: f64,
    pub separated_at: Option<f64>,
}

pub fn blasius_round_trip(res: MisesResolution, ny: usize) -> Result<BlasiusCheck> {
    let b = blasius(14.0, 1e-3);
    let bc = b.inflow(1.0, 14.0, 2e-3, 1.0)?;
    let mf = von_mises_march(&bc, 8.0, res)?;
    let flow = invert_von_mises(&mf, ny)?;
    let mut e = 0.0_f64;
    for (i, &x) in flow.xgrid.nodes().iter().enumerate() {
        for (j, &y) in flow.ygrid.nodes().iter().enumerate() {
            e = e.max((flow.u0[i][j] - b.u(x, y, 1.0)).abs());
        }
    }
    Ok(BlasiusCheck {
        flow,
        max_error: e,
        separated_at: mf.separated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_follows_inflow_residual() {
        // Δω/Δξ after one short step against √ω₁ ∂²_ψω₁ − 2p_x evaluated on
        // the inflow itself.
        let b = blasius(14.0, 1e-3);
        let mut bc = b.inflow(1.0, 14.0, 2e-3, 1.0).unwrap();
        let res = MisesResolution {
            n_psi: 200,
            n_slices: 2,
            ..Default::default()
        };
        let dpsi = 8.0 / 200.0;
        let dxi = res.dxi_factor * dpsi * dpsi;
        bc.x_end = dxi;
        let mf = von_mises_march(&bc, 8.0, res).unwrap();
        let w0 = &mf.omega[0];
        let w1 = &mf.omega[1];
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for j in 5..150 {
            let lap = (w0[j - 1] - 2.0 * w0[j] + w0[j + 1]) / (dpsi * dpsi);
            let r = w0[j].sqrt() * lap;
            worst = worst.max(((w1[j] - w0[j]) / dxi - r).abs());
            scale = scale.max(r.abs());
        }
        assert!(worst < 0.05 * scale, "{worst:e} vs {scale:e}");
    }

    #[test]
    fn blasius_wall_curvature() {
        let b = blasius(12.0, 1e-3);
        assert!((b.wall_curvature - 0.332057).abs() < 1e-5, "{}", b.wall_curvature);
    }

    #[test]
    fn streamline_heights_round_trip_tanh() {
        // Forward map ψ(Y) = log cosh Y for u = tanh Y.
        let psi: Vec<f64> = (0..=400).map(|j| j as f64 * 0.02).collect();
        let omega: Vec<f64> = psi
            .iter()
            .map(|&p| {
                let y = (p.exp() + (2.0 * p).exp().mul_add(1.0, -1.0).sqrt()).ln();
                y.tanh().powi(2)
            })
            .collect();
        let y = height_of_streamlines(&psi, &omega).unwrap();
        for (j, &p) in psi.iter().enumerate().skip(1) {
            let exact = (p.exp() + ((2.0 * p).exp() - 1.0).sqrt()).ln();
            assert!((y[j] - exact).abs() < 2e-3, "psi={p}: {} vs {exact}", y[j]);
        }
    }

    #[test]
    fn positive_wall_omega_is_rejected() {
        let psi: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(height_of_streamlines(&psi, &[1.0; 10]).is_err());
    }

    #[test]
    fn uniform_stream_is_rejected() {
        let y: Vec<f64> = (0..100).map(|j| j as f64 * 0.1).collect();
        let bc = SteadyBC::with_constant_pressure(y, vec![1.0; 100], 0.0, 1.0).unwrap();
        assert!(matches!(
            von_mises_march(&bc, 5.0, MisesResolution::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn blasius_round_trip_within_two_percent() {
        let err = |n_psi: usize| {
            let res = MisesResolution {
                n_psi,
                ..Default::default()
            };
            blasius_round_trip(res, 201).unwrap().max_error
        };
        let (e1, e2) = (err(200), err(400));
        assert!(e2 <= 0.02);
        assert!(e2 < e1);
    }
}
