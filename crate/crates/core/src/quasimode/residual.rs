use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Jets, Quasimode, QuasimodeConfig, Slice, I};
use crate::base_flow::FlowPoint;
use crate::base_flow::BaseFlow;
use crate::error::Result;
use crate::numerics::norm::weighted_sup;
use crate::numerics::{fit_exponent, DiffOp, GridFn, YGrid};
use crate::spectral::SpectralSolution;

type C64 = Complex64;

/// Nodes this close (in index) to `a(x)` or to a cutoff join are left out of
/// the direct check: `∂³ᵧS` jumps at `a(x)`, the fifth derivative of `φ` at
/// the joins, and the difference stencils straddle them.
const JUMP_EXCLUSION: usize = 3;

/// The residual amplitude `I₁ + I₂ + I₃` at one station, with the phase factor
/// removed (so `|J_ε| = predicted_amp · |total|`).
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub x: f64,
    pub ygrid: YGrid,
    pub i1: GridFn,
    pub i2: GridFn,
    pub i31: GridFn,
    pub i32: GridFn,
    pub i33: GridFn,
    pub i34: GridFn,
    pub i3: GridFn,
    pub total: GridFn,
    /// The same quantity by substituting `(û, v̂)` into the linearized
    /// equation with difference operators in y.
    pub direct: GridFn,
    /// Index of the node at `a(x)`.
    pub jump_index: usize,
    /// `max|direct − total| / max|total|` away from `a(x)` and the cutoff
    /// joins.
    pub direct_defect: f64,
    /// Relative size of `(z²−τ)V′ − 2zV − iCV‴` on the cutoff plateau.
    pub cancellation_defect: f64,
    /// `[‖∂ᵧS/ω‖, ‖∂²ᵧS/ω‖, ‖∂³ᵧS/ω‖]` in `W^{0,∞}_β`: `‖∂ʲᵧû‖/predicted_amp`.
    pub u_norms: [f64; 3],
}

impl Quasimode<'_> {
    pub fn residual_field(&self, x: f64) -> Result<ResidualField> {
        let eps = self.eps();
        let sl = self.slice(x)?;
        let g = self.ygrid(&sl)?;
        let ys = g.nodes();
        let n = ys.len();
        let st = sl.state;
        let om = sl.omega;
        let tau = self.tau();
        let c = self.spec.c;
        let dp = self.d_dx(x, |xx| self.s_over_omega(xx, ys, 1))?;
        let dq = self.d_dx(x, |xx| self.s_over_omega(xx, ys, 0))?;

        let mut parts: [Vec<C64>; 6] = Default::default();
        let mut s_vals = Vec::with_capacity(n);
        let mut pts = Vec::with_capacity(n);
        let mut cancel: (f64, f64) = (0.0, 0.0);
        for (j, &y) in ys.iter().enumerate() {
            let p = self.flow.eval(x, y);
            let (part, jt) = self.node_parts(&sl, y, &p, dp[j], dq[j]);
            let s = jt.total();
            let z = jt.z;
            if jt.phi[0] == 1.0 && z != 0.0 {
                let v = jt.v;
                let scale = ((z * z - tau) * v[1]).norm() + (2.0 * z * v[0]).norm() + (c * v[3]).norm();
                let defect = ((z * z - tau) * v[1] - 2.0 * z * v[0] - I * c * v[3]).norm();
                cancel.0 = cancel.0.max(defect);
                cancel.1 = cancel.1.max(scale);
            }
            for (k, v) in part.into_iter().enumerate() {
                parts[k].push(v);
            }
            s_vals.push(s);
            pts.push(p);
        }

        // Direct substitution: u = e^{…}P, v = e^{…}Q with P = −i∂ᵧS/ω.
        let p_hat: Vec<C64> = s_vals.iter().map(|s| -I * s[1] / om).collect();
        let d1 = DiffOp::new(&g, 1)?.apply(&p_hat);
        let d2 = DiffOp::new(&g, 2)?.apply(&p_hat);
        let direct: Vec<C64> = (0..n)
            .map(|j| {
                let p = &pts[j];
                let q_hat = s_vals[j][0] / eps + I * dq[j];
                -I / eps * (1.0 + p.u * om) * p_hat[j] + p.u * (-I * dp[j]) + p.v * d1[j] + p.ux * p_hat[j]
                    + p.uy * q_hat
                    - d2[j]
            })
            .collect();

        let [i1, i2, i31, i32, i33, i34] = parts;
        let i3: Vec<C64> = (0..n).map(|j| i31[j] + i32[j] + i33[j] + i34[j]).collect();
        let total: Vec<C64> = (0..n).map(|j| i1[j] + i2[j] + i3[j]).collect();
        let ja = g.nearest(st.a);
        let cut = self.cutoff;
        let singular: Vec<usize> = [0.0, -cut.outer, -cut.inner, cut.inner, cut.outer]
            .iter()
            .map(|d| g.nearest(st.a + d))
            .collect();
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.norm())).max(1e-300);
        let direct_defect = (2..n.saturating_sub(2))
            .filter(|&j| singular.iter().all(|&k| j.abs_diff(k) > JUMP_EXCLUSION))
            .map(|j| (direct[j] - total[j]).norm())
            .fold(0.0, f64::max)
            / scale;
        let beta = self.cfg.beta;
        let u_norms = std::array::from_fn(|k| {
            let vals: Vec<C64> = s_vals.iter().map(|s| s[k + 1] / om).collect();
            weighted_sup(ys, &vals, beta)
        });
        let mk = |v: Vec<C64>| GridFn::new(g.shared(), v);
        Ok(ResidualField {
            x,
            i1: mk(i1)?,
            i2: mk(i2)?,
            i31: mk(i31)?,
            i32: mk(i32)?,
            i33: mk(i33)?,
            i34: mk(i34)?,
            i3: mk(i3)?,
            total: mk(total)?,
            direct: mk(direct)?,
            jump_index: ja,
            direct_defect,
            cancellation_defect: if cancel.1 > 0.0 { cancel.0 / cancel.1 } else { 0.0 },
            u_norms,
            ygrid: g,
        })
    }

    /// `[I₁, I₂, I₃₁, I₃₂, I₃₃, I₃₄]` at one node, phase removed; `dp`, `dq`
    /// are `∂ₓ(∂ᵧS/ω)` and `∂ₓ(S/ω)` there.
    fn node_parts(&self, sl: &Slice, y: f64, p: &FlowPoint, dp: C64, dq: C64) -> ([C64; 6], Jets) {
        let eps = self.eps();
        let st = sl.state;
        let (sigma, ell, om) = (sl.sigma, sl.ell, sl.omega);
        let tau = self.tau();
        let c = self.spec.c;
        let zero = C64::new(0.0, 0.0);
        let jt = self.jets(sl, y, p);
        let s = jt.total();
        let d = y - st.a;
        let i1 = -I * p.u * dp - I * p.v * s[2] / om - I * p.ux * s[1] / om + I * p.uy * dq;
        let i2 = if d >= 0.0 { I * p.uyyy / om } else { zero };
        let mu2 = st.mu * st.mu;
        let i31 = -(p.u - st.ua + 0.5 * mu2 * d * d) / eps * jt.sl[1];
        let i32 = (p.uy + mu2 * d) / eps * jt.sl[0];
        let [_, g1, g2, g3] = jt.phi;
        let [v0, v1, v2, _] = jt.v;
        let z = jt.z;
        let i33 = if g1 == 0.0 && g2 == 0.0 && g3 == 0.0 {
            zero
        } else {
            sigma
                * (sigma / eps * (z * z - tau) * g1 * v0
                    - I * c * (g3 * v0 + 3.0 * g2 * v1 / ell + 3.0 * g1 * v2 / (ell * ell)))
        };
        let i34 = I * (c - st.ua + sigma * tau) * jt.sl[3];
        ([i1, i2, i31, i32, i33, i34], jt)
    }

    /// `J_ε(x, ·)/e^{−(i/ε)∫ω}` on arbitrary nodes `ys`.
    pub fn residual_amplitude(&self, x: f64, ys: &[f64]) -> Result<Vec<C64>> {
        let sl = self.slice(x)?;
        let dp = self.d_dx(x, |xx| self.s_over_omega(xx, ys, 1))?;
        let dq = self.d_dx(x, |xx| self.s_over_omega(xx, ys, 0))?;
        Ok(ys
            .iter()
            .enumerate()
            .map(|(j, &y)| {
                let p = self.flow.eval(x, y);
                self.node_parts(&sl, y, &p, dp[j], dq[j]).0.iter().sum()
            })
            .collect())
    }
}

/// Residual parts at station `x`.
pub fn residual_field(
    cfg: &QuasimodeConfig,
    flow: &BaseFlow,
    spec: &SpectralSolution,
    x: f64,
) -> Result<ResidualField> {
    Quasimode::new(cfg, flow, spec)?.residual_field(x)
}

/// Per-station norms in `W^{0,∞}_β`. Norms of the parts are of the
/// phase-stripped amplitudes; `j_norm` restores the modulus of the phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i31: f64,
    pub i32: f64,
    pub i33: f64,
    pub i34: f64,
    pub j_norm: f64,
    pub predicted_amp: f64,
    /// `j_norm / predicted_amp`.
    pub ratio: f64,
    /// `‖û‖_{W^{0,∞}_β} / predicted_amp`.
    pub u_ratio_s0: f64,
    /// `‖û‖_{W^{2,∞}_β} / predicted_amp`.
    pub u_ratio_s2: f64,
    pub direct_defect: f64,
    pub cancellation_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    /// `min_x ‖û‖_{W^{2,∞}_β}/predicted_amp`.
    pub lower_const: f64,
    /// `ε^{1/4} · max_x ‖û‖_{W^{2,∞}_β}/predicted_amp`.
    pub upper_const: f64,
    pub s0_min: f64,
    pub s0_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub eps: f64,
    pub beta: f64,
    pub c: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub rows: Vec<ResidualRow>,
    /// `sup_x j_norm / predicted_amp`.
    pub bound_constant: f64,
    /// Slope of `ln predicted_amp` against `x/√ε`.
    pub delta0_effective: f64,
    /// `μ|Im τ|/(√2 u₀(x,a)²)` averaged over the stations.
    pub delta0_leading: f64,
    pub sandwich: Sandwich,
    pub max_direct_defect: f64,
    pub max_cancellation_defect: f64,
}

impl Quasimode<'_> {
    pub fn residual_report(&self) -> Result<ResidualReport> {
        let eps = self.eps();
        let xs = self.cfg.stations();
        let rows = xs
            .par_iter()
            .map(|&x| {
                let r = self.residual_field(x)?;
                let amp = self.predicted_amp(x)?;
                let b = self.cfg.beta;
                let nrm = |f: &GridFn| weighted_sup(f.nodes(), f.values(), b);
                let ratio = nrm(&r.total);
                Ok(ResidualRow {
                    x,
                    i1: nrm(&r.i1),
                    i2: nrm(&r.i2),
                    i3: nrm(&r.i3),
                    i31: nrm(&r.i31),
                    i32: nrm(&r.i32),
                    i33: nrm(&r.i33),
                    i34: nrm(&r.i34),
                    j_norm: ratio * amp,
                    predicted_amp: amp,
                    ratio,
                    u_ratio_s0: r.u_norms[0],
                    u_ratio_s2: r.u_norms.iter().copied().fold(0.0, f64::max),
                    direct_defect: r.direct_defect,
                    cancellation_defect: r.cancellation_defect,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sx: Vec<f64> = xs.iter().map(|x| x / eps.sqrt()).collect();
        let la: Vec<f64> = rows.iter().map(|r| r.predicted_amp.ln()).collect();
        let fit = fit_exponent(&sx, &la)?;
        let mut lead = 0.0;
        for &x in &xs {
            let st = self.state(x)?;
            lead += st.mu * self.tau().im.abs() / (2f64.sqrt() * st.ua * st.ua);
        }
        let s2 = rows.iter().map(|r| r.u_ratio_s2);
        let s0 = rows.iter().map(|r| r.u_ratio_s0);
        let sandwich = Sandwich {
            lower_const: s2.clone().fold(f64::INFINITY, f64::min),
            upper_const: s2.fold(0.0, f64::max) * eps.powf(0.25),
            s0_min: s0.clone().fold(f64::INFINITY, f64::min),
            s0_max: s0.fold(0.0, f64::max),
        };
        Ok(ResidualReport {
            eps,
            beta: self.cfg.beta,
            c: self.spec.c,
            tau_re: self.tau().re,
            tau_im: self.tau().im,
            bound_constant: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
            delta0_effective: fit.rate,
            delta0_leading: lead / xs.len() as f64,
            sandwich,
            max_direct_defect: rows.iter().map(|r| r.direct_defect).fold(0.0, f64::max),
            max_cancellation_defect: rows.iter().map(|r| r.cancellation_defect).fold(0.0, f64::max),
            rows,
        })
    }
}

/// Residual norms over `[0, x_span]` and the measured bound constant.
pub fn residual_bound_check(cfg: &QuasimodeConfig, flow: &BaseFlow, spec: &SpectralSolution) -> Result<ResidualReport> {
    Quasimode::new(cfg, flow, spec)?.residual_report()
}

/// `(lower_const, upper_const)` of the growth sandwich, with the s = 0 range.
pub fn growth_sandwich_check(cfg: &QuasimodeConfig, flow: &BaseFlow, spec: &SpectralSolution) -> Result<Sandwich> {
    Ok(residual_bound_check(cfg, flow, spec)?.sandwich)
}
