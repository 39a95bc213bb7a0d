//! Closed-form base flows `u₀ = U(1−e^{−s}) − A(x)s²e^{−s}`, `s = y/d`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::flow::{BaseFlow, FlowField, FlowPoint};
use crate::error::{Error, Result};
use crate::numerics::{XGrid, YGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogId {
    MonotoneExp,
    CriticalShear,
    CriticalXdep,
}

impl std::str::FromStr for CatalogId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone_exp" => Ok(Self::MonotoneExp),
            "critical_shear" => Ok(Self::CriticalShear),
            "critical_xdep" => Ok(Self::CriticalXdep),
            other => Err(Error::invalid(format!("unknown catalog flow `{other}`"))),
        }
    }
}

impl CatalogId {
    pub fn name(self) -> &'static str {
        match self {
            Self::MonotoneExp => "monotone_exp",
            Self::CriticalShear => "critical_shear",
            Self::CriticalXdep => "critical_xdep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogParams {
    /// Far-field velocity `U`.
    pub u: f64,
    /// Decay length `d`.
    pub decay: f64,
    /// Shear amplitude `A` (at `x = 0` for the x-dependent flow).
    pub a: f64,
    /// `A(x) = A + a_slope·(1 − e^{−x/x_scale})`.
    pub a_slope: f64,
    pub x_scale: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self {
            u: 1.0,
            decay: 1.0,
            a: 1.2,
            a_slope: 0.1,
            x_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogField {
    id: CatalogId,
    p: CatalogParams,
}

impl CatalogField {
    pub fn new(id: CatalogId, p: CatalogParams) -> Result<Self> {
        if !(p.u > 0.0) || !(p.decay > 0.0) || !(p.x_scale > 0.0) {
            return Err(Error::invalid("catalog flow needs U > 0, decay > 0, x_scale > 0"));
        }
        let f = Self { id, p };
        if id != CatalogId::MonotoneExp {
            // Critical points exist iff A > U; A = U is a double root.
            let lo = p.a.min(p.a + p.a_slope.min(0.0));
            let hi = p.a + p.a_slope.max(0.0);
            for amp in [lo, hi] {
                if !(amp > p.u * (1.0 + 1e-9)) {
                    return Err(Error::invalid(format!(
                        "A = {amp} gives a degenerate or absent critical point (need A > U = {})",
                        p.u
                    )));
                }
                let s_min = 1.0 + (1.0 - p.u / amp).sqrt();
                let u_min = p.u * (1.0 - (-s_min).exp()) - amp * s_min * s_min * (-s_min).exp();
                if !(u_min > 0.0) {
                    return Err(Error::invalid(format!(
                        "A = {amp} makes u0 change sign (local minimum {u_min:.3e})"
                    )));
                }
            }
        }
        Ok(f)
    }

    fn amp(&self, x: f64) -> (f64, f64) {
        match self.id {
            CatalogId::MonotoneExp => (0.0, 0.0),
            CatalogId::CriticalShear => (self.p.a, 0.0),
            CatalogId::CriticalXdep => {
                let e = (-x / self.p.x_scale).exp();
                (self.p.a + self.p.a_slope * (1.0 - e), self.p.a_slope * e / self.p.x_scale)
            }
        }
    }

    /// Closed-form critical point `(a, u₀(a), ∂²u₀(a))` at `x`, if any.
    pub fn critical_point(&self, x: f64) -> Option<(f64, f64, f64)> {
        let (amp, _) = self.amp(x);
        if amp <= self.p.u {
            return None;
        }
        let s = 1.0 - (1.0 - self.p.u / amp).sqrt();
        let y = s * self.p.decay;
        let pt = self.eval(x, y);
        Some((y, pt.u, pt.uyy))
    }
}

impl FlowField for CatalogField {
    fn eval(&self, x: f64, y: f64) -> FlowPoint {
        let (uf, d) = (self.p.u, self.p.decay);
        let (a, da) = self.amp(x);
        let s = y / d;
        let e = (-s).exp();
        let s2 = s * s;
        FlowPoint {
            u: uf * (1.0 - e) - a * s2 * e,
            uy: e * (uf - 2.0 * a * s + a * s2) / d,
            uyy: e * (-a * s2 + 4.0 * a * s - 2.0 * a - uf) / (d * d),
            uyyy: e * (a * s2 - 6.0 * a * s + 6.0 * a + uf) / (d * d * d),
            ux: -da * s2 * e,
            uxy: -da * (2.0 * s - s2) * e / d,
            v: da * d * (2.0 - e * (s2 + 2.0 * s + 2.0)),
        }
    }

    fn p_x(&self, _x: f64) -> f64 {
        0.0
    }

    fn u_far(&self, _x: f64) -> f64 {
        self.p.u
    }

    fn x_independent(&self) -> bool {
        self.id != CatalogId::CriticalXdep || self.p.a_slope == 0.0
    }
}

/// Builds a catalog flow sampled on the given grids.
pub fn analytic_profile(id: CatalogId, params: CatalogParams, xgrid: XGrid, ygrid: YGrid) -> Result<BaseFlow> {
    let field = CatalogField::new(id, params)?;
    Ok(BaseFlow::from_field(
        id.name(),
        Arc::new(field),
        xgrid,
        ygrid,
        1.0 / params.decay,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::build_stretched_grid;

    fn grids() -> (XGrid, YGrid) {
        (
            XGrid::uniform(1.0, 11).unwrap(),
            build_stretched_grid(30.0, 600, 2.0).unwrap(),
        )
    }

    fn flow(id: CatalogId) -> BaseFlow {
        let (x, y) = grids();
        analytic_profile(id, CatalogParams::default(), x, y).unwrap()
    }

    #[test]
    fn monotone_has_positive_shear() {
        let f = flow(CatalogId::MonotoneExp);
        let min = f.du0_dy[0].iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0);
    }

    #[test]
    fn critical_shear_has_one_maximum() {
        // Sign-change scan of the closed-form shear on a fine uniform grid.
        let f = CatalogField::new(CatalogId::CriticalShear, CatalogParams::default()).unwrap();
        let ys: Vec<f64> = (1..=20000).map(|j| j as f64 * 1e-3).collect();
        let mut maxima = 0;
        for w in ys.windows(2) {
            let (p, q) = (f.eval(0.0, w[0]), f.eval(0.0, w[1]));
            if p.uy > 0.0 && q.uy <= 0.0 {
                maxima += 1;
                assert!(p.uyy < 0.0);
                assert!(p.u > 0.0);
            }
        }
        assert_eq!(maxima, 1);
    }

    #[test]
    fn derivatives_match_differences() {
        let f = CatalogField::new(CatalogId::CriticalXdep, CatalogParams::default()).unwrap();
        let (x, y, h) = (0.3, 0.8, 1e-5);
        let p = f.eval(x, y);
        let fd = |g: &dyn Fn(FlowPoint) -> f64, dx: f64, dy: f64| {
            (g(f.eval(x + dx, y + dy)) - g(f.eval(x - dx, y - dy))) / (2.0 * h)
        };
        assert!((fd(&|q| q.u, 0.0, h) - p.uy).abs() < 1e-8);
        assert!((fd(&|q| q.uy, 0.0, h) - p.uyy).abs() < 1e-8);
        assert!((fd(&|q| q.uyy, 0.0, h) - p.uyyy).abs() < 1e-8);
        assert!((fd(&|q| q.u, h, 0.0) - p.ux).abs() < 1e-8);
        assert!((fd(&|q| q.ux, 0.0, h) - p.uxy).abs() < 1e-8);
        // Incompressibility: ∂ᵧv = −∂ₓu.
        assert!((fd(&|q| q.v, 0.0, h) + p.ux).abs() < 1e-8);
    }

    #[test]
    fn no_slip_holds() {
        for id in [CatalogId::MonotoneExp, CatalogId::CriticalShear, CatalogId::CriticalXdep] {
            let f = flow(id);
            for i in 0..f.xgrid.len() {
                assert_eq!(f.u0[i][0], 0.0);
                assert!(f.v0[i][0].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_amplitude_is_rejected() {
        let p = CatalogParams {
            a: 1.0,
            a_slope: 0.0,
            ..Default::default()
        };
        assert!(CatalogField::new(CatalogId::CriticalShear, p).is_err());
        let p = CatalogParams {
            a: 0.8,
            ..Default::default()
        };
        assert!(CatalogField::new(CatalogId::CriticalShear, p).is_err());
    }
}
