//! Structural checks of the march and the transport inversion, gathered into
//! one report for the acceptance summary.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scan::{mode_grid, QuasimodeData};
use super::transport::{apply_transport, invert_transport, FlowSlice};
use super::{march_mode, ModeRun};
use crate::error::Result;
use crate::numerics::{build_stretched_grid, GridFn, YGrid};
use crate::quasimode::{incompressibility_defect, Quasimode};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub volterra_trials: usize,
    /// `max ‖T(T⁻¹R) − R‖/‖R‖` over the trials.
    pub volterra_max_error: f64,
    /// `‖𝔛(αu₁ + βu₂) − α𝔛u₁ − β𝔛u₂‖/‖𝔛(αu₁ + βu₂)‖`.
    pub linearity: f64,
    /// Gap between one leg and two legs at `Δx` and `Δx/2`.
    pub evolution_gap: [f64; 2],
    /// Wall identity defect at 8 and 16 points per layer.
    pub wall_defect: [f64; 2],
    /// Incompressibility defect of the assembled quasimode at `h` and `h/2`.
    pub incompressibility: [f64; 2],
    /// `max |‖𝔛(cu)‖ − |c|‖𝔛u‖| / (|c|‖𝔛u‖)` over the levels.
    pub homogeneity: f64,
}

impl InvariantReport {
    pub fn volterra_ok(&self) -> bool {
        self.volterra_max_error <= 1e-10
    }

    /// Each check against its scheme-order tolerance.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let order = |p: [f64; 2], lo: f64| p[1] > 0.0 && p[0] / p[1] >= lo;
        vec![
            ("linearity", self.linearity <= 1e-10),
            (
                "evolution_property",
                self.evolution_gap[0] <= 1e-2 && order(self.evolution_gap, 3.0),
            ),
            ("wall_identity", self.wall_defect[0] <= 5e-2 && order(self.wall_defect, 2.5)),
            (
                "incompressibility",
                self.incompressibility[0] <= 2e-2 && order(self.incompressibility, 3.0),
            ),
            ("homogeneity", self.homogeneity <= 1e-12),
        ]
    }

    pub fn structural_ok(&self) -> bool {
        self.checks().iter().all(|c| c.1)
    }
}

/// Smooth data with `R = O(y²)` at the wall and Gaussian decay.
fn random_transport_data(g: &YGrid, rng: &mut ChaCha8Rng) -> Result<GridFn> {
    let c: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.3..2.0),
            )
        })
        .collect();
    GridFn::from_fn(g.shared(), |y| {
        let s: C64 = c
            .iter()
            .map(|&(re, im, k)| C64::new(re, im) * (k * y).sin().powi(2) * (-k * y / 2.0).exp())
            .sum();
        s * (-0.5 * y * y).exp()
    })
}

fn rel(a: &GridFn, b: &GridFn) -> f64 {
    (a - b).max_abs() / b.max_abs()
}

/// Runs every check on the flow behind `data` with the quasimode at
/// `eps` for the incompressibility check.
pub fn structural_invariants(data: &QuasimodeData<'_>, eps: f64, seed: u64) -> Result<InvariantReport> {
    let flow = data.flow;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let g = build_stretched_grid(20.0, 801, 3.0)?;
    let slice = FlowSlice::at(flow, 0.0, &g);
    let trials = 20;
    let mut volterra_max_error = 0.0_f64;
    for _ in 0..trials {
        let r = random_transport_data(&g, &mut rng)?;
        let back = apply_transport(&invert_transport(&r, &slice)?, &slice)?;
        volterra_max_error = volterra_max_error.max(rel(&back, &r));
    }

    let k = 25.0;
    let g = mode_grid(k, 0.6, 3.0, 20.0, 8.0, 1.05)?;
    let bump = |c: C64, s: f64| GridFn::from_fn(g.shared(), move |y| c * y * y * (-s * y).exp());
    let go = |u: GridFn, start: f64, end: f64, dx: f64| {
        let mut run = ModeRun::new(k, flow, u, end, dx);
        run.start_xi = start;
        march_mode(&run)
    };

    let (a, b) = (C64::new(0.3, -1.2), C64::new(-2.0, 0.5));
    let (u1, u2) = (bump(C64::new(1.0, 0.0), 1.0)?, bump(C64::new(0.0, 1.0), 2.5)?);
    let combo = go(&u1.scale(a) + &u2.scale(b), 0.0, 0.2, 2e-3)?.last;
    let parts = &go(u1.clone(), 0.0, 0.2, 2e-3)?.last.scale(a) + &go(u2, 0.0, 0.2, 2e-3)?.last.scale(b);
    let linearity = rel(&parts, &combo);

    let gap = |dx: f64| -> Result<f64> {
        let u = bump(C64::new(1.0, 0.5), 1.5)?;
        let one = go(u.clone(), 0.0, 0.2, dx)?.last;
        let mid = go(u, 0.0, 0.1, dx)?.last;
        Ok(rel(&go(mid, 0.1, 0.2, dx)?.last, &one))
    };
    let evolution_gap = [gap(5e-4)?, gap(2.5e-4)?];

    let wall = |ppl: f64| -> Result<f64> {
        let g = mode_grid(100.0, 0.6, 3.0, 20.0, ppl, 1.04)?;
        let u = GridFn::from_fn(g.shared(), |y| C64::new(y.powi(3) * (-2.0 * y).exp(), 0.0))?;
        let mut run = ModeRun::new(100.0, flow, u, 0.2, 1e-3);
        run.opts.phase_shift = 400.0;
        Ok(march_mode(&run)?.compat_defect)
    };
    let wall_defect = [wall(8.0)?, wall(16.0)?];

    let mut cfg = data.template.clone();
    cfg.eps = eps;
    let qm = Quasimode::new(&cfg, flow, data.spec)?;
    let x = 0.5 * cfg.x_span();
    let incompressibility = [
        incompressibility_defect(&qm, x, 0.05 * eps)?,
        incompressibility_defect(&qm, x, 0.025 * eps)?,
    ];

    let c = C64::new(-3.0, 4.0);
    let e1 = go(u1.clone(), 0.0, 0.1, 2e-3)?;
    let e2 = go(u1.scale(c), 0.0, 0.1, 2e-3)?;
    let homogeneity = e1
        .norms
        .iter()
        .zip(&e2.norms)
        .map(|(n1, n2)| (n2 - c.norm() * n1).abs() / (c.norm() * n1).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);

    Ok(InvariantReport {
        volterra_trials: trials,
        volterra_max_error,
        linearity,
        evolution_gap,
        wall_defect,
        incompressibility,
        homogeneity,
    })
}
