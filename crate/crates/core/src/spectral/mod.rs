//! The shear-layer spectral condition: find `τ` with `Im τ < 0` and a profile
//! `W` on the line with `W → 0` at `−∞`, `W → 1` at `+∞` solving
//! `(τ−z²)²W′ + iC((τ−z²)W)‴ = 0`.

pub mod auxiliary;
pub mod cache;
pub mod collocation;
pub mod decay;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{complex_newton, interp, GridFn, ZGrid};

pub use auxiliary::{auxiliary_eigenproblem, AuxiliarySpectrum};
pub use collocation::{solve_w_collocation, w_residual};
pub use decay::{gaussian_tail_fit, DecayFit};

use collocation::{kappa, solve_profile, Profile};

/// Lower-half-plane box scanned for seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub cells: usize,
    pub best: usize,
}

impl Default for SeedBox {
    fn default() -> Self {
        Self {
            re_min: -4.0,
            re_max: 4.0,
            im_min: -4.0,
            im_max: -0.05,
            cells: 12,
            best: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Truncation; `None` means `8·C^{1/4}` (the natural scale of z).
    pub z_max: Option<f64>,
    /// Target spacing of the z-grid.
    pub h: f64,
    /// Bound on `|mismatch|` for an accepted root.
    pub tol: f64,
    /// Bound on the interior residual relative to
    /// `max(|τ|, z_max²)² ‖W′‖_sup`.
    pub residual_tol: f64,
    pub min_r_squared: f64,
    pub max_iter: usize,
    pub seed_box: SeedBox,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            z_max: None,
            h: 0.02,
            tol: 1e-8,
            residual_tol: 1e-6,
            min_r_squared: 0.99,
            max_iter: 40,
            seed_box: SeedBox::default(),
        }
    }
}

impl SpectralConfig {
    pub fn z_max_for(&self, c: f64) -> f64 {
        self.z_max.unwrap_or(8.0 * c.powf(0.25))
    }

    pub fn grid_for(&self, c: f64) -> Result<ZGrid> {
        let zm = self.z_max_for(c);
        if !(self.h > 0.0) {
            return Err(Error::invalid("spectral grid spacing must be positive"));
        }
        ZGrid::symmetric(zm, (zm / self.h).round().max(32.0) as usize)
    }
}

/// An accepted `(τ, W)` pair with diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub c: f64,
    pub tau: Complex64,
    pub zgrid: ZGrid,
    pub w: GridFn,
    pub v: GridFn,
    /// Max interior `|w_residual|` divided by [`Self::residual_scale`].
    pub ode_residual: f64,
    pub residual_scale: f64,
    pub bc_mismatch: f64,
    pub decay_fit: DecayFit,
    /// Every admissible root met during the search.
    pub candidates: Vec<Complex64>,
    phi: Vec<Complex64>,
    dphi: Vec<Complex64>,
    d2phi: Vec<Complex64>,
}

impl SpectralSolution {
    /// Builds the solution at a given `τ` (one collocation solve) and fills
    /// every diagnostic. No acceptance test is applied here.
    pub fn at(tau: Complex64, c: f64, zgrid: ZGrid) -> Result<Self> {
        collocation::check_trial(tau, c, &zgrid)?;
        let p = solve_profile(tau, kappa(c), &zgrid)?;
        Self::from_profile(tau, c, zgrid, p)
    }

    fn from_profile(tau: Complex64, c: f64, zgrid: ZGrid, p: Profile) -> Result<Self> {
        let z = zgrid.nodes();
        let w = p.w(tau, &zgrid);
        let dw: Vec<Complex64> = (0..z.len())
            .map(|j| (p.dphi[j] + 2.0 * z[j] * w[j]) / (tau - z[j] * z[j]))
            .collect();
        let d2w: Vec<Complex64> = (0..z.len())
            .map(|j| (p.d2phi[j] + 2.0 * w[j] + 4.0 * z[j] * dw[j]) / (tau - z[j] * z[j]))
            .collect();
        let res = w_residual(&w, tau, c, &zgrid)?;
        let dw_sup = dw.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let zm = zgrid.z_max();
        let scale = tau.norm().max(zm * zm).powi(2) * dw_sup;
        let ode_residual = res.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
        let decay_fit = decay::profile_decay(z, &w, &dw, &d2w);
        let shared = zgrid.shared();
        let v = build_v_values(tau, z, &p.phi);
        Ok(Self {
            c,
            tau,
            w: GridFn::new(Arc::clone(&shared), w)?,
            v: GridFn::new(shared, v)?,
            zgrid,
            ode_residual,
            residual_scale: scale,
            bc_mismatch: p.mismatch.norm(),
            decay_fit,
            candidates: vec![tau],
            phi: p.phi,
            dphi: p.dphi,
            d2phi: p.d2phi,
        })
    }

    pub fn is_admissible(&self, cfg: &SpectralConfig) -> bool {
        self.tau.im < 0.0
            && self.bc_mismatch <= cfg.tol
            && self.ode_residual <= cfg.residual_tol
            && self.decay_fit.passes(cfg.min_r_squared)
    }

    /// `[V, V′, V″, V‴]` at `z`, with `H(0) = 1`. Values beyond the
    /// truncation are zero.
    pub fn v_derivatives(&self, z: f64) -> [Complex64; 4] {
        let zero = Complex64::new(0.0, 0.0);
        if z.abs() > self.zgrid.z_max() {
            return [zero; 4];
        }
        let [phi, dphi, d2phi, _] = interp::hermite5(&self.zgrid, &self.phi, &self.dphi, &self.d2phi, z);
        let q = self.tau - z * z;
        // Φ‴ from the equation itself rather than from the interpolant.
        let d3phi = -(q * dphi + 2.0 * z * phi) / kappa(self.c);
        if z >= 0.0 {
            [phi - q, dphi + 2.0 * z, d2phi + 2.0, d3phi]
        } else {
            [phi, dphi, d2phi, d3phi]
        }
    }

    /// The `V`-form identity `(z²−τ)V′ − 2zV − iCV‴` at `z`, which vanishes
    /// off `z = 0` for an exact solution.
    pub fn cancellation_defect(&self, z: f64) -> Complex64 {
        let [v, dv, _, d3v] = self.v_derivatives(z);
        (z * z - self.tau) * dv - 2.0 * z * v - kappa(self.c) * d3v
    }

    pub fn phi(&self) -> &[Complex64] {
        &self.phi
    }
}

fn build_v_values(tau: Complex64, z: &[f64], phi: &[Complex64]) -> Vec<Complex64> {
    z.iter()
        .zip(phi)
        .map(|(&z, &p)| if z >= 0.0 { p - (tau - z * z) } else { p })
        .collect()
}

/// `V = (τ−z²)(W−H)` on the spectral grid, `H(0) = 1`.
pub fn build_v(sol: &SpectralSolution) -> GridFn {
    sol.v.clone()
}

/// Refits the tails of the stored profile.
pub fn verify_gaussian_decay(sol: &SpectralSolution) -> DecayFit {
    sol.decay_fit
}

/// `|mismatch|` over the seed box, computed in parallel.
pub fn mismatch_landscape(c: f64, zgrid: &ZGrid, b: &SeedBox) -> Vec<(f64, f64, f64)> {
    let n = b.cells.max(1);
    let centers: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            Complex64::new(
                b.re_min + (i as f64 + 0.5) * (b.re_max - b.re_min) / n as f64,
                b.im_min + (j as f64 + 0.5) * (b.im_max - b.im_min) / n as f64,
            )
        })
        .collect();
    centers
        .par_iter()
        .map(|&t| {
            let m = solve_w_collocation(t, c, zgrid)
                .map(|(_, m)| m.norm())
                .unwrap_or(f64::INFINITY);
            (t.re, t.im, m)
        })
        .collect()
}

/// Seeds from the auxiliary problem followed by the best cells of the box.
pub fn default_seeds(c: f64, cfg: &SpectralConfig) -> Result<Vec<Complex64>> {
    let zgrid = cfg.grid_for(c)?;
    let mut seeds = auxiliary_eigenproblem(c, 8.0, 400)?.tau_seeds();
    let mut land = mismatch_landscape(c, &zgrid, &cfg.seed_box);
    land.sort_by(|a, b| a.2.total_cmp(&b.2));
    seeds.extend(
        land.iter()
            .take(cfg.seed_box.best)
            .map(|&(re, im, _)| Complex64::new(re, im)),
    );
    Ok(seeds)
}

/// Newton on the mismatch from every seed; keeps roots that pass all
/// acceptance tests and returns the one with the largest `|Im τ|`.
pub fn find_tau(c: f64, seeds: &[Complex64], cfg: &SpectralConfig) -> Result<SpectralSolution> {
    if !(c > 0.0) {
        return Err(Error::precondition(format!("C must be positive, got {c}")));
    }
    if seeds.is_empty() || seeds.iter().any(|s| !(s.im < 0.0)) {
        return Err(Error::precondition("seeds must lie in the open lower half-plane"));
    }
    let zgrid = cfg.grid_for(c)?;
    let roots: Vec<Complex64> = seeds
        .par_iter()
        .filter_map(|&seed| {
            complex_newton(
                |t| {
                    if t.im >= 0.0 {
                        return Err(Error::precondition("left the lower half-plane"));
                    }
                    Ok(solve_profile(t, kappa(c), &zgrid)?.mismatch)
                },
                seed,
                cfg.tol * 1e-3,
                cfg.max_iter,
            )
            .or_else(|e| match e {
                Error::NoConvergence { best, residual, .. } if residual <= cfg.tol => {
                    Ok(crate::numerics::NewtonRoot {
                        root: best,
                        residual,
                        iterations: cfg.max_iter,
                    })
                }
                e => Err(e),
            })
            .ok()
            .map(|r| r.root)
        })
        .collect();
    let mut accepted: Vec<SpectralSolution> = Vec::new();
    for t in roots {
        if accepted.iter().any(|s| (s.tau - t).norm() < 1e-6 * (1.0 + t.norm())) {
            continue;
        }
        if let Ok(sol) = SpectralSolution::at(t, c, zgrid.clone()) {
            if sol.is_admissible(cfg) {
                accepted.push(sol);
            }
        }
    }
    let candidates: Vec<Complex64> = accepted.iter().map(|s| s.tau).collect();
    let best = accepted
        .into_iter()
        .max_by(|a, b| a.tau.im.abs().total_cmp(&b.tau.im.abs()));
    match best {
        Some(mut sol) => {
            sol.candidates = candidates;
            Ok(sol)
        }
        None => Err(Error::NoRoot {
            seeds: seeds.len(),
            landscape: mismatch_landscape(c, &zgrid, &cfg.seed_box),
        }),
    }
}

/// [`find_tau`] with [`default_seeds`].
pub fn solve_spectral(c: f64, cfg: &SpectralConfig) -> Result<SpectralSolution> {
    let seeds = default_seeds(c, cfg)?;
    find_tau(c, &seeds, cfg)
}

/// Mismatch of the conjugated problem (`i ↦ −i`, conjugated conditions)
/// at a trial `τ` in the upper half-plane.
pub fn conjugate_mismatch(tau: Complex64, c: f64, zgrid: &ZGrid) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(Error::precondition("conjugated problem lives in the upper half-plane"));
    }
    Ok(solve_profile(tau, kappa(c).conj(), zgrid)?.mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn solved(c: f64) -> SpectralSolution {
        solve_spectral(c, &SpectralConfig::default()).unwrap()
    }

    #[test]
    fn unit_c_root_is_admissible() {
        let s = solved(1.0);
        eprintln!(
            "tau={} res={:e} mismatch={:e} fit={:?} cands={:?}",
            s.tau, s.ode_residual, s.bc_mismatch, s.decay_fit, s.candidates
        );
        assert!(s.tau.im < 0.0);
        assert!(s.bc_mismatch <= 1e-8);
        assert!(s.decay_fit.c > 0.0 && s.decay_fit.r_squared >= 0.99);
    }

    #[test]
    fn upper_half_plane_seeds_rejected() {
        let cfg = SpectralConfig::default();
        assert!(matches!(
            find_tau(1.0, &[c64(0.0, 1.0)], &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn v_jumps_by_minus_tau() {
        let s = solved(1.0);
        let z = s.zgrid.nodes();
        let m = s.zgrid.center();
        let tau = s.tau;
        // Right-continuous V at 0 against the left neighbour extrapolated.
        let left = s.v_derivatives(-1e-12)[0];
        let right = s.v_derivatives(0.0)[0];
        assert!((right - left + tau).norm() < 1e-9);
        assert_eq!(s.v.values()[m], right);
        assert!(z[m] == 0.0);
    }

    #[test]
    fn far_mismatch_is_not_small() {
        let s = solved(1.0);
        let (_, far) = solve_w_collocation(c64(1.5, -2.5), 1.0, &s.zgrid).unwrap();
        assert!(far.norm() > 1e-2);
    }

    #[test]
    fn mismatch_is_grid_converged() {
        let cfg = SpectralConfig::default();
        let g1 = cfg.grid_for(1.0).unwrap();
        let g2 = ZGrid::symmetric(g1.z_max(), 2 * g1.center()).unwrap();
        let t = c64(0.4, -1.3);
        let (_, m1) = solve_w_collocation(t, 1.0, &g1).unwrap();
        let (_, m2) = solve_w_collocation(t, 1.0, &g2).unwrap();
        assert!((m1 - m2).norm() < 0.1 * m1.norm(), "{m1} vs {m2}");
    }

    #[test]
    fn cancellation_identity_holds_off_zero() {
        let s = solved(1.0);
        for &z in &[-3.1, -0.7, 0.3, 1.9, 4.2] {
            let d = s.cancellation_defect(z).norm();
            assert!(d < 1e-8, "z={z} defect={d:e}");
        }
    }

    #[test]
    fn conjugated_problem_has_conjugate_root() {
        let s = solved(1.0);
        let m = conjugate_mismatch(s.tau.conj(), 1.0, &s.zgrid).unwrap();
        assert!(m.norm() <= 1e-8);
        let off = conjugate_mismatch(s.tau.conj() + c64(0.3, 0.2), 1.0, &s.zgrid).unwrap();
        assert!(off.norm() > 1e-4);
    }
}
