use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::fit_exponent;

/// Fit of `log|f| ≈ log C′ − c z²` on a tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c: f64,
    pub c_prime: f64,
    pub r_squared: f64,
}

impl DecayFit {
    fn worst(self, other: DecayFit) -> DecayFit {
        DecayFit {
            c: self.c.min(other.c),
            c_prime: self.c_prime.max(other.c_prime),
            r_squared: self.r_squared.min(other.r_squared),
        }
    }

    pub fn passes(&self, min_r_squared: f64) -> bool {
        self.c > 0.0 && self.r_squared >= min_r_squared
    }
}

/// Relative level below which tail samples are dropped from a fit.
const FLOOR: f64 = 1e-10;

/// Gaussian fit of `f` over `lo ≤ |z| ≤ hi` on the side selected by `right`,
/// ignoring samples more than ten decades below `max |f|`.
pub fn gaussian_tail_fit(z: &[f64], f: &[Complex64], lo: f64, hi: f64, right: bool) -> Option<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut push = |zj: f64, fj: Complex64| {
        let a = fj.norm();
        if a > 0.0 && a.is_finite() {
            xs.push(zj * zj);
            ys.push(a.ln());
        }
    };
    if right {
        for (&zj, &fj) in z.iter().zip(f) {
            if zj >= lo && zj <= hi {
                push(zj, fj);
            }
        }
    } else {
        for (&zj, &fj) in z.iter().zip(f).rev() {
            if -zj >= lo && -zj <= hi {
                push(zj, fj);
            }
        }
    }
    // Samples at the rounding floor carry no decay information.
    let top = f.iter().map(|v| v.norm()).filter(|a| a.is_finite()).fold(0.0, f64::max);
    let keep: Vec<bool> = ys.iter().map(|&y| y >= (FLOOR * top).ln()).collect();
    let xs: Vec<f64> = xs.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
    let ys: Vec<f64> = ys.iter().zip(&keep).filter(|p| *p.1).map(|p| *p.0).collect();
    if xs.len() < 5 {
        return None;
    }
    let fit = fit_exponent(&xs, &ys).ok()?;
    Some(DecayFit {
        c: -fit.rate,
        c_prime: fit.intercept.exp(),
        r_squared: fit.r_squared,
    })
}

/// Worst Gaussian fit over both tails of `W`, `W′`, `W″` on the windows
/// `0.3 z_max ≤ |z| ≤ 0.8 z_max` (`W−1` on the right).
pub fn profile_decay(z: &[f64], w: &[Complex64], dw: &[Complex64], d2w: &[Complex64]) -> DecayFit {
    let zm = z[z.len() - 1];
    let (lo, hi) = (0.3 * zm, 0.8 * zm);
    let w_minus_one: Vec<Complex64> = w.iter().map(|v| v - 1.0).collect();
    let fits = [
        gaussian_tail_fit(z, w, lo, hi, false),
        gaussian_tail_fit(z, &w_minus_one, lo, hi, true),
        gaussian_tail_fit(z, dw, lo, hi, false),
        gaussian_tail_fit(z, dw, lo, hi, true),
        gaussian_tail_fit(z, d2w, lo, hi, false),
        gaussian_tail_fit(z, d2w, lo, hi, true),
    ];
    let bad = DecayFit {
        c: f64::NEG_INFINITY,
        c_prime: f64::INFINITY,
        r_squared: 0.0,
    };
    fits.into_iter()
        .map(|f| f.unwrap_or(bad))
        .reduce(DecayFit::worst)
        .unwrap_or(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn grid() -> Vec<f64> {
        (0..=800).map(|j| -8.0 + 0.02 * j as f64).collect()
    }

    #[test]
    fn synthetic_gaussian_tails() {
        // ½(1+tanh z) with its tails replaced by exact Gaussians.
        let z = grid();
        let w: Vec<_> = z
            .iter()
            .map(|&z| {
                if z < -2.0 {
                    c(0.5 * (-z * z).exp())
                } else if z > 2.0 {
                    c(1.0 - 0.5 * (-z * z).exp())
                } else {
                    c(0.5 * (1.0 + z.tanh()))
                }
            })
            .collect();
        let left = gaussian_tail_fit(&z, &w, 2.4, 6.4, false).unwrap();
        let wm1: Vec<_> = w.iter().map(|v| v - 1.0).collect();
        let right = gaussian_tail_fit(&z, &wm1, 2.4, 6.4, true).unwrap();
        for f in [left, right] {
            assert!((f.c - 1.0).abs() < 0.02, "{f:?}");
            assert!(f.r_squared > 0.999);
        }
    }

    #[test]
    fn algebraic_tail_is_flagged() {
        let z = grid();
        let w: Vec<_> = z.iter().map(|&z| c(1.0 / (z * z))).collect();
        let f = gaussian_tail_fit(&z, &w, 2.4, 6.4, false).unwrap();
        assert!(f.r_squared < 0.9 || !f.passes(0.99), "{f:?}");
    }
}
