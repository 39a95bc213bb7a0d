//! The unstable quasimode around a base flow with a non-degenerate critical
//! point: the regular and shear-layer parts of the vertical velocity, the
//! assembled `(û, v̂)` amplitudes, the residual with its term-by-term split,
//! and the growth and residual bound checks.

mod cutoff;
mod field;
mod report;
mod residual;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::base_flow::{critical_point_curve, find_critical_point, BaseFlow, CriticalCurve, CriticalState, FlowPoint};
use crate::error::{Error, Result};
use crate::numerics::{GridFn, YGrid};
use crate::spectral::SpectralSolution;

pub use cutoff::Cutoff;
pub use field::{assemble, incompressibility_defect, FieldSlice, QuasimodeField};
pub use report::{write_report_csv, write_report_json, write_summary_csv, EpsSummary};
pub use residual::{
    growth_sandwich_check, residual_bound_check, residual_field, ResidualField, ResidualReport, ResidualRow, Sandwich,
};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuasimodeConfig {
    pub eps: f64,
    /// Weight of the `W^{s,∞}_β` norms.
    pub beta: f64,
    /// Defaults to `a(0)/5`.
    pub cutoff_inner: Option<f64>,
    /// Defaults to `0.95·a(0)`.
    pub cutoff_outer: Option<f64>,
    /// Defaults to `ε^{1/4}`.
    pub x_span: Option<f64>,
    /// Number of x-stations in `[0, x_span]`.
    pub n_x: usize,
    /// Truncation height of the per-slice grids; defaults to `30/max(β, ½)`.
    pub y_max: Option<f64>,
    /// Nodes per shear-layer width `(2ε/μ²)^{1/4}` (or per cutoff transition,
    /// if narrower) in the fine region.
    pub points_per_layer: f64,
    /// Geometric growth of the spacing above the fine region.
    pub growth: f64,
    /// Finite-difference step in x as a multiple of `ε`.
    pub dx_factor: f64,
}

impl Default for QuasimodeConfig {
    fn default() -> Self {
        Self {
            eps: 1e-2,
            beta: 0.5,
            cutoff_inner: None,
            cutoff_outer: None,
            x_span: None,
            n_x: 21,
            y_max: None,
            points_per_layer: 40.0,
            growth: 1.03,
            dx_factor: 0.25,
        }
    }
}

impl QuasimodeConfig {
    pub fn new(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }

    pub fn x_span(&self) -> f64 {
        self.x_span.unwrap_or_else(|| self.eps.powf(0.25))
    }

    pub fn y_max(&self) -> f64 {
        self.y_max.unwrap_or(30.0 / self.beta.max(0.5))
    }

    pub fn dx(&self) -> f64 {
        self.dx_factor * self.eps
    }

    /// Checks everything that does not need the flow.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::config("quasimode.eps", format!("must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::config("quasimode.beta", "must be nonnegative"));
        }
        let span = self.x_span();
        if !(span > 0.0 && span <= self.eps.powf(0.25) * (1.0 + 1e-12)) {
            return Err(Error::config(
                "quasimode.x_span",
                format!("must lie in (0, eps^(1/4)] = (0, {:.4}], got {span}", self.eps.powf(0.25)),
            ));
        }
        if self.n_x < 3 {
            return Err(Error::config("quasimode.n_x", "need at least 3 stations"));
        }
        if !(self.points_per_layer >= 4.0) {
            return Err(Error::config("quasimode.points_per_layer", "need at least 4"));
        }
        if !(self.growth >= 1.0 && self.growth < 1.5) {
            return Err(Error::config("quasimode.growth", "must lie in [1, 1.5)"));
        }
        if !(self.dx_factor > 0.0 && self.dx_factor <= 1.0) {
            return Err(Error::config("quasimode.dx_factor", "x step must satisfy 0 < dx <= eps"));
        }
        Ok(())
    }

    /// Evenly spaced stations on `[0, x_span]`.
    pub fn stations(&self) -> Vec<f64> {
        let span = self.x_span();
        (0..self.n_x).map(|i| span * i as f64 / (self.n_x - 1) as f64).collect()
    }
}

/// Kinematics of one x-station: the critical point, the shear-layer scale
/// `ℓ = (2ε/μ²)^{1/4}`, the amplitude `σ = √(ε/2)μ` and `ω(ε, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub x: f64,
    pub state: CriticalState,
    pub sigma: f64,
    pub ell: f64,
    pub omega: C64,
}

/// `S = v_reg + v_sl` and its split, with three y-derivatives each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jets {
    pub reg: [C64; 4],
    pub sl: [C64; 4],
    /// `[φ, φ′, φ″, φ‴]` at `y − a`.
    pub phi: [f64; 4],
    /// `[V, V′, V″, V‴]` (z-derivatives) at `z`.
    pub v: [C64; 4],
    pub z: f64,
}

impl Jets {
    pub fn total(&self) -> [C64; 4] {
        std::array::from_fn(|k| self.reg[k] + self.sl[k])
    }
}

/// A quasimode problem: config, flow, spectral solution and the tracked
/// critical curve, validated together.
#[derive(Debug, Clone)]
pub struct Quasimode<'a> {
    pub cfg: QuasimodeConfig,
    pub flow: &'a BaseFlow,
    pub spec: &'a SpectralSolution,
    pub curve: CriticalCurve,
    pub cutoff: Cutoff,
}

impl<'a> Quasimode<'a> {
    pub fn new(cfg: &QuasimodeConfig, flow: &'a BaseFlow, spec: &'a SpectralSolution) -> Result<Self> {
        cfg.validate()?;
        if cfg.beta > flow.alpha_decay
            || (cfg.beta == flow.alpha_decay && flow.u_far(0.0) != flow.u_far(cfg.x_span()))
        {
            return Err(Error::config(
                "quasimode.beta",
                format!(
                    "beta = {} must stay below the flow decay rate {} (equality needs a constant far field)",
                    cfg.beta, flow.alpha_decay
                ),
            ));
        }
        let a0 = find_critical_point(flow)?;
        let curve = critical_point_curve(flow, a0)?;
        let c = curve.c_spectral;
        if (spec.c - c).abs() > 1e-9 * c.abs().max(1.0) {
            return Err(Error::precondition(format!(
                "spectral solution is for C = {} but u0(0, a(0)) = {c}",
                spec.c
            )));
        }
        let inner = cfg.cutoff_inner.unwrap_or(0.2 * a0);
        let outer = cfg.cutoff_outer.unwrap_or(0.95 * a0);
        if !(inner > 0.0) {
            return Err(Error::config("quasimode.cutoff_inner", format!("must be positive, got {inner}")));
        }
        if !(outer > inner) {
            return Err(Error::config(
                "quasimode.cutoff_outer",
                format!("must exceed cutoff_inner = {inner}, got {outer}"),
            ));
        }
        let this = Self {
            cfg: cfg.clone(),
            flow,
            spec,
            curve,
            cutoff: Cutoff { inner, outer },
        };
        for x in cfg.stations() {
            let a = this.state(x)?.a;
            if outer >= a {
                return Err(Error::config(
                    "quasimode.cutoff_outer",
                    format!("cutoff support {outer} reaches the wall: a({x:.4}) = {a:.4}"),
                ));
            }
        }
        Ok(this)
    }

    pub fn eps(&self) -> f64 {
        self.cfg.eps
    }

    pub fn tau(&self) -> C64 {
        self.spec.tau
    }

    pub fn state(&self, x: f64) -> Result<CriticalState> {
        if x == 0.0 || self.flow.is_x_independent() {
            return crate::base_flow::polish(self.flow, 0.0, self.curve.a[0]);
        }
        self.curve.state_at(self.flow, x)
    }

    pub fn slice(&self, x: f64) -> Result<Slice> {
        let state = self.state(x)?;
        let eps = self.eps();
        let sigma = (eps / 2.0).sqrt() * state.mu;
        let ell = (2.0 * eps / (state.mu * state.mu)).powf(0.25);
        let omega = omega_from(state.ua, sigma, self.tau())?;
        Ok(Slice {
            x,
            state,
            sigma,
            ell,
            omega,
        })
    }

    /// Per-slice grid with a node exactly at `a(x)`.
    pub fn ygrid(&self, sl: &Slice) -> Result<YGrid> {
        let a = sl.state.a;
        let w = self.cutoff.outer - self.cutoff.inner;
        let h = sl.ell.min(w) / self.cfg.points_per_layer;
        let fine_end = a + self.cutoff.outer + 4.0 * sl.ell;
        YGrid::anchored(a, h, fine_end, self.cfg.y_max().max(fine_end + 1.0), self.cfg.growth)
    }

    /// Jets of `v_reg`, `v_sl` at height `y`, given the flow there.
    pub fn jets(&self, sl: &Slice, y: f64, p: &FlowPoint) -> Jets {
        let zero = C64::new(0.0, 0.0);
        let st = &sl.state;
        let d = y - st.a;
        let shift = sl.sigma * self.tau();
        let reg = if d >= 0.0 {
            [C64::from(p.u - st.ua) + shift, p.uy.into(), p.uyy.into(), p.uyyy.into()]
        } else {
            [zero; 4]
        };
        let g = self.cutoff.jet(d);
        let z = d / sl.ell;
        if g == [0.0; 4] {
            return Jets {
                reg,
                sl: [zero; 4],
                phi: g,
                v: [zero; 4],
                z,
            };
        }
        let v = self.spec.v_derivatives(z);
        let l = sl.ell;
        let s = sl.sigma;
        let vl = [v[0], v[1] / l, v[2] / (l * l), v[3] / (l * l * l)];
        let slv = [
            s * g[0] * vl[0],
            s * (g[1] * vl[0] + g[0] * vl[1]),
            s * (g[2] * vl[0] + 2.0 * g[1] * vl[1] + g[0] * vl[2]),
            s * (g[3] * vl[0] + 3.0 * g[2] * vl[1] + 3.0 * g[1] * vl[2] + g[0] * vl[3]),
        ];
        Jets {
            reg,
            sl: slv,
            phi: g,
            v,
            z,
        }
    }

    /// Jets of `S = v_reg + v_sl` on `ys` at station `sl`.
    pub fn s_jets(&self, sl: &Slice, ys: &[f64]) -> Vec<[C64; 4]> {
        ys.iter()
            .map(|&y| self.jets(sl, y, &self.flow.eval(sl.x, y)).total())
            .collect()
    }

    /// `∫₀ˣ ω(ε, ξ) dξ`: exact for x-independent flows, composite Simpson
    /// otherwise.
    pub fn phase(&self, x: f64) -> Result<C64> {
        if x == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if self.flow.is_x_independent() {
            return Ok(self.slice(0.0)?.omega * x);
        }
        let panels = ((64.0 * x / self.cfg.x_span()).ceil() as usize).max(8) * 2;
        let h = x / panels as f64;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=panels {
            let w = if j == 0 || j == panels {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * self.slice(h * j as f64)?.omega;
        }
        Ok(acc * h / 3.0)
    }

    /// `exp((1/ε)∫₀ˣ Im ω)`, the modulus of the phase factor.
    pub fn predicted_amp(&self, x: f64) -> Result<f64> {
        Ok((self.phase(x)?.im / self.eps()).exp())
    }

    /// x-derivative of a phase-free amplitude `f`: exactly zero for
    /// x-independent flows, a difference with step `dx` otherwise.
    pub(crate) fn d_dx<F>(&self, x: f64, f: F) -> Result<Vec<C64>>
    where
        F: Fn(f64) -> Result<Vec<C64>>,
    {
        self.d_dx_step(x, self.cfg.dx(), f)
    }

    pub(crate) fn d_dx_step<F>(&self, x: f64, h: f64, f: F) -> Result<Vec<C64>>
    where
        F: Fn(f64) -> Result<Vec<C64>>,
    {
        if self.flow.is_x_independent() {
            return Ok(vec![C64::new(0.0, 0.0); f(x)?.len()]);
        }
        self.difference(x, h, f)
    }

    /// Centered difference in x of `f` (one-sided second order near the
    /// start of the flow's x-range).
    pub(crate) fn difference<F>(&self, x: f64, h: f64, f: F) -> Result<Vec<C64>>
    where
        F: Fn(f64) -> Result<Vec<C64>>,
    {
        let x_lo = self.flow.xgrid.first();
        if x - h >= x_lo {
            let (p, m) = (f(x + h)?, f(x - h)?);
            Ok(p.iter().zip(&m).map(|(p, m)| (p - m) / (2.0 * h)).collect())
        } else {
            let (f0, f1, f2) = (f(x)?, f(x + h)?, f(x + 2.0 * h)?);
            Ok((0..f0.len())
                .map(|j| (-3.0 * f0[j] + 4.0 * f1[j] - f2[j]) / (2.0 * h))
                .collect())
        }
    }
}

fn omega_from(ua: f64, sigma: f64, tau: C64) -> Result<C64> {
    let den = -ua + sigma * tau;
    if den.norm() <= 1e-12 * (ua.abs() + (sigma * tau).norm()).max(1e-300) {
        return Err(Error::SingularConfiguration(format!(
            "phase denominator −u0(a) + √(ε/2)μτ vanishes (u0(a) = {ua}, √(ε/2)μτ = {})",
            sigma * tau
        )));
    }
    Ok(1.0 / den)
}

/// `ω(ε, x) = 1/(−u₀(x, a(x)) + √(ε/2)μ(x)τ)`.
pub fn phase_omega(x: f64, cfg: &QuasimodeConfig, flow: &BaseFlow, spec: &SpectralSolution) -> Result<C64> {
    Ok(Quasimode::new(cfg, flow, spec)?.slice(x)?.omega)
}

/// `v_reg` of the station `x` on its anchored grid.
pub fn v_reg(x: f64, cfg: &QuasimodeConfig, flow: &BaseFlow, spec: &SpectralSolution) -> Result<GridFn> {
    let qm = Quasimode::new(cfg, flow, spec)?;
    let sl = qm.slice(x)?;
    let g = qm.ygrid(&sl)?;
    let vals = g
        .nodes()
        .iter()
        .map(|&y| qm.jets(&sl, y, &flow.eval(x, y)).reg[0])
        .collect();
    GridFn::new(g.shared(), vals)
}

/// `v_sl` of the station `x` on its anchored grid.
pub fn v_sl(x: f64, cfg: &QuasimodeConfig, flow: &BaseFlow, spec: &SpectralSolution) -> Result<GridFn> {
    let qm = Quasimode::new(cfg, flow, spec)?;
    let sl = qm.slice(x)?;
    let g = qm.ygrid(&sl)?;
    let vals = g
        .nodes()
        .iter()
        .map(|&y| qm.jets(&sl, y, &flow.eval(x, y)).sl[0])
        .collect();
    GridFn::new(g.shared(), vals)
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    #[test]
    fn omega_has_positive_imaginary_part_and_expansion() {
        let (f, s) = shear();
        let cfg = QuasimodeConfig::new(1e-8);
        let qm = Quasimode::new(&cfg, f, s).unwrap();
        let sl = qm.slice(0.0).unwrap();
        assert!(sl.omega.im > 0.0);
        let first_order = -sl.sigma * s.tau.im / (sl.state.ua * sl.state.ua);
        assert!((sl.omega.im - first_order).abs() < 1e-3 * first_order, "{} vs {first_order}", sl.omega.im);
        let lim = -1.0 / sl.state.ua;
        let tiny = omega_from(sl.state.ua, 1e-12, s.tau).unwrap();
        assert!((tiny.re - lim).abs() < 1e-9);
    }

    #[test]
    fn singular_denominator_is_rejected() {
        let tau = C64::new(0.8, 0.0);
        assert!(matches!(omega_from(0.4, 0.5, tau), Err(Error::SingularConfiguration(_))));
    }

    #[test]
    fn v_reg_heaviside_and_far_field() {
        let (f, s) = shear();
        let cfg = QuasimodeConfig::new(1e-2);
        let qm = Quasimode::new(&cfg, f, s).unwrap();
        let sl = qm.slice(0.0).unwrap();
        let g = v_reg(0.0, &cfg, f, s).unwrap();
        let ja = g.grid().nearest(sl.state.a);
        assert_eq!(g.nodes()[ja], sl.state.a);
        assert!(g.values()[..ja].iter().all(|v| v.norm() == 0.0));
        let at_a = g.values()[ja];
        assert!((at_a - sl.sigma * s.tau).norm() < 1e-12);
        let top = *g.values().last().unwrap();
        let expect = C64::from(f.u_far(0.0) - sl.state.ua) + sl.sigma * s.tau;
        assert!((top - expect).norm() < 1e-9);
    }

    #[test]
    fn v_sl_support_and_sqrt_eps_scaling() {
        let (f, s) = shear();
        let c1 = QuasimodeConfig::new(1e-2);
        let c2 = QuasimodeConfig::new(2.5e-3);
        let qm = Quasimode::new(&c1, f, s).unwrap();
        let g1 = v_sl(0.0, &c1, f, s).unwrap();
        let a = qm.slice(0.0).unwrap().state.a;
        for (y, v) in g1.nodes().iter().zip(g1.values()) {
            if (y - a).abs() > qm.cutoff.outer {
                assert_eq!(v.norm(), 0.0);
            }
        }
        // On the plateau, v_sl / √ε at fixed z is ε-independent.
        let q2 = Quasimode::new(&c2, f, s).unwrap();
        let (s1, s2) = (qm.slice(0.0).unwrap(), q2.slice(0.0).unwrap());
        let p = f.eval(0.0, a);
        for &z in &[-0.2, 0.1, 0.2] {
            let v1 = qm.jets(&s1, a + z * s1.ell, &p).sl[0];
            let v2 = q2.jets(&s2, a + z * s2.ell, &p).sl[0];
            assert!((v1 / v2 - 2.0).norm() < 1e-9, "z={z}: {}", v1 / v2);
        }
    }

    #[test]
    fn jumps_cancel_through_second_derivative() {
        let (f, s) = shear();
        let cfg = QuasimodeConfig::new(2.5e-3);
        let qm = Quasimode::new(&cfg, f, s).unwrap();
        let sl = qm.slice(0.0).unwrap();
        let a = sl.state.a;
        let d = 1e-9;
        let up = qm.jets(&sl, a, &f.eval(0.0, a)).total();
        let lo = qm.jets(&sl, a - d, &f.eval(0.0, a - d)).total();
        let scale = [sl.sigma, sl.sigma / sl.ell, sl.sigma / sl.ell.powi(2)];
        for k in 0..3 {
            let jump = (up[k] - lo[k]).norm();
            assert!(jump < 1e-6 * scale[k].max(1.0), "derivative {k}: jump {jump:.3e}");
        }
    }

    #[test]
    fn cutoff_reaching_wall_is_a_config_error() {
        let (f, s) = shear();
        let mut cfg = QuasimodeConfig::new(1e-2);
        cfg.cutoff_inner = Some(0.2);
        cfg.cutoff_outer = Some(5.0);
        match Quasimode::new(&cfg, f, s) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "quasimode.cutoff_outer"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn x_span_beyond_window_is_rejected() {
        let mut cfg = QuasimodeConfig::new(1e-2);
        cfg.x_span = Some(0.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn xdep_phase_matches_trapezoid_reference() {
        let (f, s) = xdep();
        let cfg = QuasimodeConfig::new(1e-2);
        let qm = Quasimode::new(&cfg, f, s).unwrap();
        let x = cfg.x_span();
        let n = 4000;
        let h = x / n as f64;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=n {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += w * qm.slice(h * j as f64).unwrap().omega;
        }
        acc *= h;
        assert!((qm.phase(x).unwrap() - acc).norm() < 1e-7 * acc.norm());
    }
}
