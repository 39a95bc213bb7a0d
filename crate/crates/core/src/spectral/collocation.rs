//! Two-point fourth-order box scheme for the profile equation.
//!
//! With `Φ = (τ−z²)W` the equation becomes `κΦ‴ + (τ−z²)Φ′ + 2zΦ = 0`
//! (`κ = iC`). The unknowns are `(Φ, Φ′, Φ″)` at every node, coupled by
//! `y_{i+1} − y_i = h/2 (y′_i + y′_{i+1}) + h²/12 (y″_i − y″_{i+1})`.
//! Four far-field conditions are imposed and the `Φ″` equation of the
//! interval right of `z = 0` is left out; its residual is the mismatch.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{BandMatrix, ZGrid};

type C64 = Complex64;
type Block = [[C64; 3]; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Discrete solution of one collocation solve.
#[derive(Debug, Clone)]
pub struct Profile {
    pub phi: Vec<C64>,
    pub dphi: Vec<C64>,
    pub d2phi: Vec<C64>,
    pub mismatch: C64,
}

impl Profile {
    pub fn w(&self, tau: C64, zgrid: &ZGrid) -> Vec<C64> {
        zgrid
            .nodes()
            .iter()
            .zip(&self.phi)
            .map(|(&z, &p)| p / (tau - z * z))
            .collect()
    }
}

fn system(z: f64, tau: C64, kappa: C64) -> (Block, Block) {
    let a = -2.0 * z / kappa;
    let b = -(tau - z * z) / kappa;
    let amat = [[ZERO, ONE, ZERO], [ZERO, ZERO, ONE], [a, b, ZERO]];
    // M = A' + A²
    let mmat = [
        [ZERO, ZERO, ONE],
        [a, b, ZERO],
        [-2.0 / kappa, a + 2.0 * z / kappa, b],
    ];
    (amat, mmat)
}

fn interval_blocks(z0: f64, z1: f64, tau: C64, kappa: C64) -> (Block, Block) {
    let h = z1 - z0;
    let (a0, m0) = system(z0, tau, kappa);
    let (a1, m1) = system(z1, tau, kappa);
    let mut left = [[ZERO; 3]; 3];
    let mut right = [[ZERO; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let id = if r == c { ONE } else { ZERO };
            left[r][c] = -(id + a0[r][c] * (h / 2.0) + m0[r][c] * (h * h / 12.0));
            right[r][c] = id - a1[r][c] * (h / 2.0) + m1[r][c] * (h * h / 12.0);
        }
    }
    (left, right)
}

pub(crate) fn solve_profile(tau: C64, kappa: C64, zgrid: &ZGrid) -> Result<Profile> {
    let z = zgrid.nodes();
    let n = z.len();
    let zm = zgrid.z_max();
    let center = zgrid.center();
    let dim = 3 * n;
    let mut m = BandMatrix::new(dim, 4, 4);
    let mut rhs = vec![ZERO; dim];
    m.set(0, 0, ONE);
    m.set(1, 1, ONE);
    let mut row = 2;
    let mut dropped = None;
    for i in 0..n - 1 {
        let (left, right) = interval_blocks(z[i], z[i + 1], tau, kappa);
        for r in 0..3 {
            if i == center && r == 2 {
                dropped = Some((left[r], right[r]));
                continue;
            }
            for c in 0..3 {
                m.set(row, 3 * i + c, left[r][c]);
                m.set(row, 3 * (i + 1) + c, right[r][c]);
            }
            row += 1;
        }
    }
    m.set(row, 3 * (n - 1), ONE);
    rhs[row] = tau - zm * zm;
    m.set(row + 1, 3 * (n - 1) + 1, ONE);
    rhs[row + 1] = C64::new(-2.0 * zm, 0.0);
    debug_assert_eq!(row + 2, dim);

    let lu = m.factor()?;
    let y = lu.solve(&rhs);
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure {
            message: format!("collocation solve produced non-finite values at tau = {tau}"),
            condition: lu.condition_estimate(),
        });
    }
    let (left, right) = dropped.expect("grid has a centre interval");
    let mismatch = (0..3)
        .map(|c| left[c] * y[3 * center + c] + right[c] * y[3 * (center + 1) + c])
        .sum();
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    let mut d2phi = Vec::with_capacity(n);
    for i in 0..n {
        phi.push(y[3 * i]);
        dphi.push(y[3 * i + 1]);
        d2phi.push(y[3 * i + 2]);
    }
    Ok(Profile {
        phi,
        dphi,
        d2phi,
        mismatch,
    })
}

pub(crate) fn kappa(c: f64) -> C64 {
    C64::new(0.0, c)
}

/// Solves the profile equation at a trial `τ` with the four far-field
/// conditions `W(−z_max) = W′(−z_max) = 0`, `W(z_max) = 1`, `W′(z_max) = 0`
/// and returns `W` with the eigenvalue mismatch.
///
/// The mismatch is the jump of `Φ″ = ((τ−z²)W)″` across the centre interval,
/// which stays bounded in `τ`; see the crate notes on why it replaces an
/// endpoint derivative.
pub fn solve_w_collocation(tau: C64, c: f64, zgrid: &ZGrid) -> Result<(Vec<C64>, C64)> {
    check_trial(tau, c, zgrid)?;
    let p = solve_profile(tau, kappa(c), zgrid)?;
    Ok((p.w(tau, zgrid), p.mismatch))
}

pub(crate) fn check_trial(tau: C64, c: f64, zgrid: &ZGrid) -> Result<()> {
    if !(c > 0.0) {
        return Err(Error::precondition(format!("C must be positive, got {c}")));
    }
    if !(tau.im < 0.0) {
        return Err(Error::precondition(format!(
            "tau must lie in the open lower half-plane, got {tau}"
        )));
    }
    if zgrid.len() < 64 {
        return Err(Error::invalid("z-grid needs at least 64 nodes"));
    }
    Ok(())
}

/// Pointwise residual `(τ−z²)²W′ + iC((τ−z²)W)‴` at interior nodes
/// (endpoints are set to zero).
pub fn w_residual(w: &[C64], tau: C64, c: f64, zgrid: &ZGrid) -> Result<Vec<C64>> {
    residual_with(w, tau, kappa(c), zgrid)
}

pub(crate) fn residual_with(w: &[C64], tau: C64, kappa: C64, zgrid: &ZGrid) -> Result<Vec<C64>> {
    use crate::numerics::DiffOp;
    if zgrid.len() < 64 {
        return Err(Error::invalid("z-grid needs at least 64 nodes"));
    }
    if w.len() != zgrid.len() {
        return Err(Error::invalid("profile and grid differ in length"));
    }
    let z = zgrid.nodes();
    let d1 = DiffOp::new(zgrid, 1)?;
    let d3 = DiffOp::new(zgrid, 3)?;
    let phi: Vec<C64> = z.iter().zip(w).map(|(&z, &w)| (tau - z * z) * w).collect();
    let dw = d1.apply(w);
    let d3phi = d3.apply(&phi);
    let n = z.len();
    Ok((0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                ZERO
            } else {
                let q = tau - z[j] * z[j];
                q * q * dw[j] + kappa * d3phi[j]
            }
        })
        .collect())
}
