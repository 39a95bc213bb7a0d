//! JSON cache of spectral solutions.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DecayFit, SpectralSolution};
use crate::error::{Error, Result};
use crate::numerics::ZGrid;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralCache {
    #[serde(rename = "C")]
    pub c: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub z_max: f64,
    pub n: usize,
    #[serde(rename = "W_re")]
    pub w_re: Vec<f64>,
    #[serde(rename = "W_im")]
    pub w_im: Vec<f64>,
    pub residual: f64,
    pub decay_fit: DecayFit,
}

impl From<&SpectralSolution> for SpectralCache {
    fn from(s: &SpectralSolution) -> Self {
        Self {
            c: s.c,
            tau_re: s.tau.re,
            tau_im: s.tau.im,
            z_max: s.zgrid.z_max(),
            n: s.zgrid.len(),
            w_re: s.w.values().iter().map(|v| v.re).collect(),
            w_im: s.w.values().iter().map(|v| v.im).collect(),
            residual: s.ode_residual,
            decay_fit: s.decay_fit,
        }
    }
}

/// File name for a cache entry; every input that changes the value is
/// part of the key.
pub fn cache_key(c: f64, z_max: f64, n: usize, tol: f64) -> String {
    let mut h = Sha256::new();
    for v in [c, z_max, tol] {
        h.update(v.to_bits().to_le_bytes());
    }
    h.update((n as u64).to_le_bytes());
    let digest = h.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("spectral_{hex}.json")
}

pub fn cache_path(dir: &Path, c: f64, z_max: f64, n: usize, tol: f64) -> PathBuf {
    dir.join(cache_key(c, z_max, n, tol))
}

pub fn write_cache(path: &Path, sol: &SpectralSolution) -> Result<()> {
    let text = serde_json::to_string_pretty(&SpectralCache::from(sol))?;
    fs::write(path, text)?;
    Ok(())
}

/// Reads a cache entry and rebuilds the full solution by one collocation
/// solve at the stored `τ`; a stored profile that does not match is
/// reported as stale.
pub fn read_cache(path: &Path) -> Result<SpectralSolution> {
    let entry: SpectralCache = serde_json::from_str(&fs::read_to_string(path)?)?;
    if entry.n.is_multiple_of(2) || entry.n < 5 {
        return Err(Error::invalid(format!("cache {} has an even node count", path.display())));
    }
    let zgrid = ZGrid::symmetric(entry.z_max, (entry.n - 1) / 2)?;
    let sol = SpectralSolution::at(Complex64::new(entry.tau_re, entry.tau_im), entry.c, zgrid)?;
    let stale = sol
        .w
        .values()
        .iter()
        .zip(entry.w_re.iter().zip(&entry.w_im))
        .any(|(v, (&re, &im))| (v - Complex64::new(re, im)).norm() > 1e-9);
    if stale || entry.w_re.len() != sol.w.len() {
        return Err(Error::invalid(format!("cache {} is stale", path.display())));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_changes_with_tol() {
        assert_ne!(cache_key(1.0, 8.0, 801, 1e-8), cache_key(1.0, 8.0, 801, 1e-9));
        assert_eq!(cache_key(1.0, 8.0, 801, 1e-8), cache_key(1.0, 8.0, 801, 1e-8));
    }
}
