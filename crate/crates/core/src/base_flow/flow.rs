use std::fmt;
use std::sync::Arc;

use crate::numerics::diff::DiffOp;
use crate::numerics::grid::Grid;
use crate::numerics::quad::cumulative_trapezoid_real;
use crate::numerics::{XGrid, YGrid};

/// Base-flow quantities at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlowPoint {
    pub u: f64,
    pub uy: f64,
    pub uyy: f64,
    pub uyyy: f64,
    pub ux: f64,
    pub uxy: f64,
    pub v: f64,
}

/// Pointwise evaluator behind a [`BaseFlow`].
pub trait FlowField: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64, y: f64) -> FlowPoint;
    fn p_x(&self, x: f64) -> f64;
    fn u_far(&self, x: f64) -> f64;
    /// Whether the field is exactly independent of `x`.
    fn x_independent(&self) -> bool;
}

/// A stationary flow `(u₀, v₀)` sampled on `xgrid × ygrid`, with a pointwise
/// evaluator for off-grid queries.
#[derive(Debug, Clone)]
pub struct BaseFlow {
    pub name: String,
    pub xgrid: XGrid,
    pub ygrid: YGrid,
    /// Row `i` holds the profile at `xgrid[i]`.
    pub u0: Vec<Vec<f64>>,
    pub v0: Vec<Vec<f64>>,
    pub du0_dy: Vec<Vec<f64>>,
    pub d2u0_dy2: Vec<Vec<f64>>,
    pub du0_dx: Vec<Vec<f64>>,
    pub alpha_decay: f64,
    field: Arc<dyn FlowField>,
}

impl BaseFlow {
    /// Samples `field` on the grids.
    pub fn from_field(
        name: impl Into<String>,
        field: Arc<dyn FlowField>,
        xgrid: XGrid,
        ygrid: YGrid,
        alpha_decay: f64,
    ) -> Self {
        let mut rows: [Vec<Vec<f64>>; 5] = Default::default();
        for &x in xgrid.nodes() {
            let pts: Vec<FlowPoint> = ygrid.nodes().iter().map(|&y| field.eval(x, y)).collect();
            rows[0].push(pts.iter().map(|p| p.u).collect());
            rows[1].push(pts.iter().map(|p| p.v).collect());
            rows[2].push(pts.iter().map(|p| p.uy).collect());
            rows[3].push(pts.iter().map(|p| p.uyy).collect());
            rows[4].push(pts.iter().map(|p| p.ux).collect());
        }
        let [u0, v0, du0_dy, d2u0_dy2, du0_dx] = rows;
        Self {
            name: name.into(),
            xgrid,
            ygrid,
            u0,
            v0,
            du0_dy,
            d2u0_dy2,
            du0_dx,
            alpha_decay,
            field,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> FlowPoint {
        self.field.eval(x, y)
    }

    pub fn p_x(&self, x: f64) -> f64 {
        self.field.p_x(x)
    }

    pub fn u_far(&self, x: f64) -> f64 {
        self.field.u_far(x)
    }

    pub fn is_x_independent(&self) -> bool {
        self.field.x_independent()
    }

    pub fn field(&self) -> &Arc<dyn FlowField> {
        &self.field
    }

    /// Profile `u₀(x, y_j)` on an arbitrary y-grid.
    pub fn profile(&self, x: f64, ys: &[f64]) -> Vec<FlowPoint> {
        ys.iter().map(|&y| self.field.eval(x, y)).collect()
    }
}

/// A flow known only through samples on a (possibly per-slice) grid.
///
/// Values between slices are linear in `x`; within a slice a four-point
/// Lagrange interpolant is used for `u₀` and its finite-difference
/// derivatives. `∂ₓ` comes from differences across slices.
#[derive(Debug, Clone)]
pub struct SampledField {
    xs: Vec<f64>,
    ys: Vec<f64>,
    u: Vec<Vec<f64>>,
    uy: Vec<Vec<f64>>,
    uyy: Vec<Vec<f64>>,
    uyyy: Vec<Vec<f64>>,
    ux: Vec<Vec<f64>>,
    uxy: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    p_x: f64,
    u_far: Vec<f64>,
}

impl SampledField {
    /// `u[i][j]` is `u₀(xs[i], ys[j])`; `v₀` is rebuilt from incompressibility.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, u: Vec<Vec<f64>>, p_x: f64) -> crate::Result<Self> {
        let grid = Grid::from_nodes(ys.clone())?;
        let d1 = DiffOp::new(&grid, 1)?;
        let d2 = DiffOp::new(&grid, 2)?;
        let d3 = DiffOp::new(&grid, 3)?;
        let uy: Vec<Vec<f64>> = u.iter().map(|r| d1.apply_real(r)).collect();
        let uyy: Vec<Vec<f64>> = u.iter().map(|r| d2.apply_real(r)).collect();
        let uyyy: Vec<Vec<f64>> = u.iter().map(|r| d3.apply_real(r)).collect();
        let nx = xs.len();
        let ux: Vec<Vec<f64>> = if nx < 2 {
            vec![vec![0.0; ys.len()]; nx]
        } else {
            let xg = Grid::from_nodes(xs.clone())?;
            let order1 = if nx >= 3 { Some(DiffOp::new(&xg, 1)?) } else { None };
            (0..nx)
                .map(|i| {
                    (0..ys.len())
                        .map(|j| match &order1 {
                            Some(op) => {
                                let (s, w) = op.row(i);
                                w.iter().enumerate().map(|(k, wk)| wk * u[s + k][j]).sum()
                            }
                            None => (u[1][j] - u[0][j]) / (xs[1] - xs[0]),
                        })
                        .collect()
                })
                .collect()
        };
        let uxy: Vec<Vec<f64>> = ux.iter().map(|r| d1.apply_real(r)).collect();
        let v: Vec<Vec<f64>> = ux
            .iter()
            .map(|r| cumulative_trapezoid_real(&ys, r).iter().map(|s| -s).collect())
            .collect();
        let u_far = u.iter().map(|r| r[r.len() - 1]).collect();
        Ok(Self {
            xs,
            ys,
            u,
            uy,
            uyy,
            uyyy,
            ux,
            uxy,
            v,
            p_x,
            u_far,
        })
    }

    fn interp_row(&self, row: &[f64], y: f64) -> f64 {
        let n = self.ys.len();
        let j = self.ys.partition_point(|&t| t <= y).clamp(1, n - 1) - 1;
        let s = j.saturating_sub(1).min(n.saturating_sub(4));
        let pts = &self.ys[s..(s + 4).min(n)];
        let mut acc = 0.0;
        for (a, &ya) in pts.iter().enumerate() {
            let mut l = 1.0;
            for (b, &yb) in pts.iter().enumerate() {
                if a != b {
                    l *= (y - yb) / (ya - yb);
                }
            }
            acc += l * row[s + a];
        }
        acc
    }

    fn slice_weights(&self, x: f64) -> (usize, usize, f64) {
        let n = self.xs.len();
        if n == 1 || x <= self.xs[0] {
            return (0, 0, 0.0);
        }
        if x >= self.xs[n - 1] {
            return (n - 1, n - 1, 0.0);
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        (i, i + 1, t)
    }
}

impl FlowField for SampledField {
    fn eval(&self, x: f64, y: f64) -> FlowPoint {
        let (i0, i1, t) = self.slice_weights(x);
        let at = |f: &Vec<Vec<f64>>| {
            let a = self.interp_row(&f[i0], y);
            if t == 0.0 {
                a
            } else {
                a * (1.0 - t) + self.interp_row(&f[i1], y) * t
            }
        };
        FlowPoint {
            u: at(&self.u),
            uy: at(&self.uy),
            uyy: at(&self.uyy),
            uyyy: at(&self.uyyy),
            ux: at(&self.ux),
            uxy: at(&self.uxy),
            v: at(&self.v),
        }
    }

    fn p_x(&self, _x: f64) -> f64 {
        self.p_x
    }

    fn u_far(&self, x: f64) -> f64 {
        let (i0, i1, t) = self.slice_weights(x);
        self.u_far[i0] * (1.0 - t) + self.u_far[i1] * t
    }

    fn x_independent(&self) -> bool {
        self.xs.len() == 1
    }
}
