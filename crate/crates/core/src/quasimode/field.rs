use num_complex::Complex64;
use rayon::prelude::*;

use super::{Quasimode, QuasimodeConfig, I};
use crate::base_flow::BaseFlow;
use crate::error::Result;
use crate::numerics::{GridFn, YGrid};
use crate::spectral::SpectralSolution;

type C64 = Complex64;

/// One x-station of the assembled quasimode. `u_hat` and `v_hat` carry the
/// full phase factor `e^{−(i/ε)∫ω}`.
#[derive(Debug, Clone)]
pub struct FieldSlice {
    pub x: f64,
    pub a: f64,
    pub omega: C64,
    /// `∫₀ˣ ω(ε, ξ) dξ`.
    pub phase: C64,
    pub predicted_amp: f64,
    pub ygrid: YGrid,
    pub u_hat: GridFn,
    pub v_hat: GridFn,
}

#[derive(Debug, Clone)]
pub struct QuasimodeField<'a> {
    pub qm: Quasimode<'a>,
    pub slices: Vec<FieldSlice>,
}

impl QuasimodeField<'_> {
    pub fn config(&self) -> &QuasimodeConfig {
        &self.qm.cfg
    }

    pub fn xs(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.x).collect()
    }

    pub fn predicted_amp(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.predicted_amp).collect()
    }

    pub fn phase_omega(&self) -> Vec<C64> {
        self.slices.iter().map(|s| s.omega).collect()
    }
}

impl Quasimode<'_> {
    /// `e^{−(i/ε)∫₀ˣ ω}`.
    pub fn phase_factor(&self, x: f64) -> Result<C64> {
        Ok((-I * self.phase(x)? / self.eps()).exp())
    }

    /// `û(x, y)` on `ys` (phase included).
    pub fn u_hat_at(&self, x: f64, ys: &[f64]) -> Result<Vec<C64>> {
        let e = self.phase_factor(x)?;
        Ok(self.u_shape(x, ys)?.into_iter().map(|v| e * v).collect())
    }

    /// `−i∂ᵧS/ω`, the amplitude of `û` without its phase.
    pub fn u_shape(&self, x: f64, ys: &[f64]) -> Result<Vec<C64>> {
        let sl = self.slice(x)?;
        Ok(self.s_jets(&sl, ys).into_iter().map(|j| -I * j[1] / sl.omega).collect())
    }

    /// `v̂ = (1/ε)e^{…}S + i e^{…}∂ₓ(S/ω)` on `ys`.
    pub fn v_hat_at(&self, x: f64, ys: &[f64]) -> Result<Vec<C64>> {
        let e = self.phase_factor(x)?;
        let sl = self.slice(x)?;
        let s = self.s_jets(&sl, ys);
        let dq = self.d_dx(x, |xx| self.s_over_omega(xx, ys, 0))?;
        Ok(s.iter()
            .zip(&dq)
            .map(|(j, dq)| e * (j[0] / self.eps() + I * dq))
            .collect())
    }

    /// `∂^k_y S / ω` at station `x` on `ys`.
    pub(crate) fn s_over_omega(&self, x: f64, ys: &[f64], k: usize) -> Result<Vec<C64>> {
        let sl = self.slice(x)?;
        Ok(self.s_jets(&sl, ys).into_iter().map(|j| j[k] / sl.omega).collect())
    }

    fn field_slice(&self, x: f64) -> Result<FieldSlice> {
        let sl = self.slice(x)?;
        let ygrid = self.ygrid(&sl)?;
        let ys = ygrid.nodes();
        let phase = self.phase(x)?;
        let u = self.u_hat_at(x, ys)?;
        let v = self.v_hat_at(x, ys)?;
        Ok(FieldSlice {
            x,
            a: sl.state.a,
            omega: sl.omega,
            phase,
            predicted_amp: (phase.im / self.eps()).exp(),
            u_hat: GridFn::new(ygrid.shared(), u)?,
            v_hat: GridFn::new(ygrid.shared(), v)?,
            ygrid,
        })
    }
}

/// Assembles `(û, v̂)` at every station of `cfg`.
pub fn assemble<'a>(
    cfg: &QuasimodeConfig,
    flow: &'a BaseFlow,
    spec: &'a SpectralSolution,
) -> Result<QuasimodeField<'a>> {
    let qm = Quasimode::new(cfg, flow, spec)?;
    let slices = cfg
        .stations()
        .par_iter()
        .map(|&x| qm.field_slice(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuasimodeField { qm, slices })
}

/// `max|D_h û + ∂ᵧv̂| / max|∂ᵧv̂|` at station `x`, where `D_h` is the
/// centered difference with step `h` (phase restored) and `∂ᵧv̂` is exact
/// in y with its own x-difference at the same step.
pub fn incompressibility_defect(qm: &Quasimode<'_>, x: f64, h: f64) -> Result<f64> {
    let sl = qm.slice(x)?;
    let g = qm.ygrid(&sl)?;
    let ys = g.nodes();
    let dudx = qm.difference(x, h, |xx| qm.u_hat_at(xx, ys))?;
    let e = qm.phase_factor(x)?;
    let s = qm.s_jets(&sl, ys);
    let dq = qm.d_dx_step(x, h, |xx| qm.s_over_omega(xx, ys, 1))?;
    let mut num = 0.0_f64;
    let mut den = 0.0_f64;
    for j in 0..ys.len() {
        let dv = e * (s[j][1] / qm.eps() + I * dq[j]);
        num = num.max((dudx[j] + dv).norm());
        den = den.max(dv.norm());
    }
    Ok(num / den.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::*;
    use crate::numerics::norm::weighted_sup;

    #[test]
    fn wall_and_far_field() {
        let (f, s) = shear();
        let field = assemble(&QuasimodeConfig::new(1e-2), f, s).unwrap();
        for sl in &field.slices {
            assert_eq!(sl.u_hat.values()[0].norm(), 0.0);
            assert_eq!(sl.v_hat.values()[0].norm(), 0.0);
            let beta = field.config().beta;
            let peak = weighted_sup(sl.u_hat.nodes(), sl.u_hat.values(), beta);
            let tail = (beta * sl.ygrid.y_max()).exp() * sl.u_hat.values().last().unwrap().norm();
            assert!(tail < 1e-8 * peak, "tail {tail:.3e} vs peak {peak:.3e}");
        }
    }

    #[test]
    fn amplitude_factorizes_for_x_independent_flow() {
        let (f, s) = shear();
        let field = assemble(&QuasimodeConfig::new(1e-2), f, s).unwrap();
        let first = &field.slices[0];
        let eps = 1e-2;
        for sl in &field.slices[1..] {
            let e = (-I * first.omega * sl.x / eps).exp();
            for (u, u0) in sl.u_hat.values().iter().zip(first.u_hat.values()) {
                assert!((u - e * u0).norm() <= 1e-10 * sl.predicted_amp * (1.0 + u0.norm()));
            }
            let ratio = sl.u_hat.max_abs() / sl.predicted_amp;
            assert!((ratio - first.u_hat.max_abs()).abs() < 1e-10 * ratio);
        }
    }

    #[test]
    fn incompressibility_defect_is_second_order() {
        for (f, s) in [shear(), xdep()] {
            let cfg = QuasimodeConfig::new(1e-2);
            let qm = Quasimode::new(&cfg, f, s).unwrap();
            let x = 0.5 * cfg.x_span();
            let d1 = incompressibility_defect(&qm, x, 0.05 * cfg.eps).unwrap();
            let d2 = incompressibility_defect(&qm, x, 0.025 * cfg.eps).unwrap();
            assert!(d1 < 2e-2, "{d1}");
            let order = (d1 / d2).log2();
            assert!((order - 2.0).abs() < 0.2, "order {order} ({d1:.3e} -> {d2:.3e})");
        }
    }
}
