//! Single time-Fourier-mode evolution of the linearized Prandtl equation,
//! marched in x, and the high-frequency growth scan built on it.

mod export;
mod invariants;
mod march;
mod scan;
mod transport;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use invariants::{structural_invariants, InvariantReport};
pub use export::{write_evolution_csv, write_scan_csv, write_snapshot_csv};
pub use scan::{
    evolve_quasimode_consistency, illposedness_scan, mode_grid, ConsistencyOptions, ConsistencyReport, DeltaVerdict, QuasimodeData,
    ScanConfig, ScanResult, ScanRow,
};
pub use transport::{apply_transport, invert_transport, invert_transport_closed, FlowSlice, COMPAT_TOL};

use march::{Bdf, Coeffs, Stepper};

use crate::base_flow::BaseFlow;
use crate::error::{Error, Result};
use crate::numerics::norm::weighted_sup;
use crate::numerics::quad::cumulative_trapezoid;
use crate::numerics::{fit_exponent, GridFn, YGrid};

type C64 = Complex64;

/// Forcing `f(x, ·)` on the march grid, added to the right-hand side of the
/// linearized equation.
pub type Forcing<'a> = Arc<dyn Fn(f64) -> Result<Vec<C64>> + Send + Sync + 'a>;

/// Step parameters shared by every march of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchOptions {
    /// Weight of the sup-norm `‖e^{βy}û‖`.
    pub beta: f64,
    /// Frame rotation `θ`: the march advances `e^{−iθx}û`. Exact for any
    /// value; choosing the expected phase speed lets `dx` follow the growth
    /// scale instead of the oscillation.
    pub phase_shift: f64,
    /// Abort when the norm grows by more than this factor in one step.
    pub growth_ceiling: f64,
    /// `|∂²ᵧû(x,0) + f(x,0)| / max|∂²ᵧû|` above which a warning is recorded.
    pub compat_tol: f64,
}

impl Default for MarchOptions {
    fn default() -> Self {
        Self {
            beta: 0.5,
            phase_shift: 0.0,
            growth_ceiling: 10.0,
            compat_tol: 5e-2,
        }
    }
}

#[derive(Clone)]
pub struct ModeRun<'a> {
    /// Time frequency (`1/ε`).
    pub k: f64,
    pub flow: &'a BaseFlow,
    /// `û(ξ, ·)`; its grid is the march grid.
    pub initial: GridFn,
    pub start_xi: f64,
    pub x_end: f64,
    pub dx: f64,
    /// Keep every n-th level as a snapshot (the first and last always).
    pub snapshots_every: usize,
    pub opts: MarchOptions,
    pub forcing: Option<Forcing<'a>>,
}

impl std::fmt::Debug for ModeRun<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeRun")
            .field("k", &self.k)
            .field("flow", &self.flow.name)
            .field("start_xi", &self.start_xi)
            .field("x_end", &self.x_end)
            .field("dx", &self.dx)
            .field("snapshots_every", &self.snapshots_every)
            .field("opts", &self.opts)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl<'a> ModeRun<'a> {
    pub fn new(k: f64, flow: &'a BaseFlow, initial: GridFn, x_end: f64, dx: f64) -> Self {
        Self {
            k,
            flow,
            initial,
            start_xi: 0.0,
            x_end,
            dx,
            snapshots_every: usize::MAX,
            opts: MarchOptions::default(),
            forcing: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::invalid(format!("k must be finite and >= 0, got {}", self.k)));
        }
        if !(self.dx > 0.0) || !(self.x_end > self.start_xi) {
            return Err(Error::invalid(format!(
                "need dx > 0 and x_end > start_xi (dx {}, [{}, {}])",
                self.dx, self.start_xi, self.x_end
            )));
        }
        if self.initial.len() < 5 {
            return Err(Error::invalid("march grid needs at least five nodes"));
        }
        if self.initial.nodes()[0] != 0.0 {
            return Err(Error::invalid("march grid must start at the wall"));
        }
        let u0 = self.initial.values()[0].norm();
        if u0 > 1e-12 * self.initial.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(format!("initial data must vanish at the wall (|u(0)| = {u0:.3e})")));
        }
        if self.snapshots_every == 0 {
            return Err(Error::invalid("snapshots_every must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub x: f64,
    pub u_hat: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct ModeEvolution {
    pub k: f64,
    pub start_xi: f64,
    pub dx: f64,
    pub opts: MarchOptions,
    pub ygrid: YGrid,
    /// Every x-level, starting at `start_xi`.
    pub xs: Vec<f64>,
    /// `‖û(x, ·)‖_{W^{0,∞}_β}` at every level.
    pub norms: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Slope of `ln‖û‖` against x over the last three quarters of the run.
    pub gamma: f64,
    /// `max_x |∂²ᵧû(x,0) + f(x,0)| / max_y|∂²ᵧû(x,·)|`.
    pub compat_defect: f64,
    pub warnings: Vec<String>,
    /// `û` at the last level.
    pub last: GridFn,
}

impl ModeEvolution {
    pub fn final_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Norm at the level closest to `x`.
    pub fn norm_at(&self, x: f64) -> f64 {
        let j = self
            .xs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .map(|(j, _)| j)
            .unwrap();
        self.norms[j]
    }
}

fn split(state: &[C64]) -> Vec<C64> {
    state.iter().step_by(2).copied().collect()
}

/// Marches `−ikû + u₀∂ₓû + v₀∂ᵧû + û∂ₓu₀ + v̂∂ᵧu₀ − ∂²ᵧû = f`,
/// `v̂ = −∫₀ʸ∂ₓû`, from `start_xi` to `x_end`: backward Euler for the first
/// step, BDF2 afterwards, fully implicit in y. `û(x,0) = 0` and `û = 0` at
/// the top of the grid.
pub fn march_mode(run: &ModeRun<'_>) -> Result<ModeEvolution> {
    run.validate()?;
    let grid = YGrid::from_nodes(run.initial.nodes().to_vec())?;
    let ys = grid.nodes();
    let n = ys.len();
    let beta = run.opts.beta;
    let theta = run.opts.phase_shift;
    let stepper = Stepper::new(run.k, theta, &grid);
    let steps = ((run.x_end - run.start_xi) / run.dx).round().max(1.0) as usize;
    let dx = (run.x_end - run.start_xi) / steps as f64;
    let frozen = run.flow.is_x_independent();

    let rot = |x: f64| (-I * theta * (x - run.start_xi)).exp();
    let mut state = vec![C64::new(0.0, 0.0); 2 * n];
    let big_f = cumulative_trapezoid(ys, run.initial.values());
    for j in 0..n {
        state[2 * j] = run.initial.values()[j];
        state[2 * j + 1] = big_f[j];
    }
    state[0] = C64::new(0.0, 0.0);

    let norm0 = weighted_sup(ys, run.initial.values(), beta);
    let mut xs = vec![run.start_xi];
    let mut norms = vec![norm0];
    let mut snapshots = vec![Snapshot {
        x: run.start_xi,
        u_hat: run.initial.values().to_vec(),
    }];
    let mut warnings = Vec::new();
    let mut compat_defect = 0.0_f64;
    let mut prev2 = state.clone();

    let mut coeffs = Coeffs::at(run.flow, run.start_xi + dx, ys)?;
    let mut lu_euler = Some(stepper.matrix(&coeffs, Bdf::euler(dx))?);
    let mut lu_bdf2: Option<crate::numerics::BandLu> = None;

    for s in 1..=steps {
        let x = run.start_xi + s as f64 * dx;
        if !frozen && s > 1 {
            coeffs = Coeffs::at(run.flow, x, ys)?;
        }
        let bdf = if s == 1 { Bdf::euler(dx) } else { Bdf::second(dx) };
        let forcing = match &run.forcing {
            Some(f) => {
                let r = rot(x);
                let mut g = f(x)?;
                if g.len() != n {
                    return Err(Error::invalid("forcing length does not match the march grid"));
                }
                g.iter_mut().for_each(|v| *v *= r);
                Some(g)
            }
            None => None,
        };
        let mut b = stepper.rhs(&coeffs, bdf, &state, &prev2, forcing.as_deref());
        if s == 1 {
            lu_euler.take().unwrap().solve_in_place(&mut b);
        } else if frozen {
            if lu_bdf2.is_none() {
                lu_bdf2 = Some(stepper.matrix(&coeffs, bdf)?);
            }
            lu_bdf2.as_ref().unwrap().solve_in_place(&mut b);
        } else {
            stepper.matrix(&coeffs, bdf)?.solve_in_place(&mut b);
        }
        prev2 = std::mem::replace(&mut state, b);

        let u = split(&state);
        let norm = weighted_sup(ys, &u, beta);
        let last = *norms.last().unwrap();
        if !norm.is_finite() || (last > 0.0 && norm > run.opts.growth_ceiling * last) {
            return Err(Error::Stability {
                at: xs.last().copied().unwrap(),
                reason: format!("norm jumped from {last:.3e} to {norm:.3e} in one step"),
            });
        }
        let curv = stepper.max_curvature(&u);
        if curv > 0.0 {
            let f0 = forcing.as_ref().map_or(C64::new(0.0, 0.0), |g| g[0]);
            let d = (stepper.wall_curvature(&u) + f0).norm() / curv;
            if d > run.opts.compat_tol && d > compat_defect {
                warnings.push(format!("wall identity drift {d:.3e} at x = {x:.5e}"));
            }
            compat_defect = compat_defect.max(d);
        }
        xs.push(x);
        norms.push(norm);
        if s % run.snapshots_every == 0 || s == steps {
            let r = rot(x).inv();
            snapshots.push(Snapshot {
                x,
                u_hat: u.iter().map(|v| v * r).collect(),
            });
        }
    }

    let r = rot(*xs.last().unwrap()).inv();
    let last = GridFn::new(grid.shared(), split(&state).into_iter().map(|v| v * r).collect())?;
    let gamma = growth_rate(&xs, &norms);
    Ok(ModeEvolution {
        k: run.k,
        start_xi: run.start_xi,
        dx,
        opts: run.opts,
        ygrid: grid,
        xs,
        norms,
        snapshots,
        gamma,
        compat_defect,
        warnings,
        last,
    })
}

const I: C64 = C64::new(0.0, 1.0);

/// Least-squares slope of `ln‖û‖` over the last three quarters of the levels;
/// zero when the solution vanishes identically.
fn growth_rate(xs: &[f64], norms: &[f64]) -> f64 {
    let x0 = xs[0] + 0.25 * (xs[xs.len() - 1] - xs[0]);
    let (sx, sl): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(norms)
        .filter(|(x, v)| **x >= x0 && **v > 0.0)
        .map(|(x, v)| (*x, v.ln()))
        .unzip();
    fit_exponent(&sx, &sl).map(|f| f.rate).unwrap_or(0.0)
}

/// `max_trials ‖û(x)‖/‖û(ξ)‖` in `W^{0,∞}_β`, each trial marched from `xi`.
pub fn operator_norm_lower_bound(
    k: f64,
    flow: &BaseFlow,
    x: f64,
    xi: f64,
    dx: f64,
    opts: MarchOptions,
    trials: &[GridFn],
) -> Result<f64> {
    use rayon::prelude::*;
    if trials.is_empty() {
        return Err(Error::invalid("operator norm bound needs at least one trial"));
    }
    let ratios = trials
        .par_iter()
        .map(|t| {
            let n0 = weighted_sup(t.nodes(), t.values(), opts.beta);
            if !(n0 > 0.0) {
                return Err(Error::invalid("trial functions must be nonzero"));
            }
            let mut run = ModeRun::new(k, flow, t.clone(), x, dx);
            run.start_xi = xi;
            run.opts = opts;
            let ev = march_mode(&run)?;
            Ok(ev.norms.last().unwrap() / n0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests;
