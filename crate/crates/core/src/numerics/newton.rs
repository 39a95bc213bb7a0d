use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonRoot {
    pub root: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton iteration for a scalar analytic residual, with the derivative
/// taken by a central difference of step `1e-6·(1+|τ|)` along the real axis.
///
/// A step that increases `|f|` is halved up to eight times. A derivative that
/// vanishes (relative to `|f|`) stops the iteration with the best iterate.
pub fn complex_newton<F>(f: F, seed: Complex64, tol: f64, max_iter: usize) -> Result<NewtonRoot>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = seed;
    let mut fz = f(z)?;
    let mut best = (z, fz.norm());
    for it in 0..=max_iter {
        let r = fz.norm();
        if r < best.1 {
            best = (z, r);
        }
        if r <= tol {
            return Ok(NewtonRoot {
                root: z,
                residual: r,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        let h = 1e-6 * (1.0 + z.norm());
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if !d.is_finite() || d.norm() <= f64::EPSILON * r.max(1.0) {
            return Err(Error::NoConvergence {
                iterations: it,
                best: best.0,
                residual: best.1,
            });
        }
        let step = fz / d;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..8 {
            let trial = z - step * lambda;
            if let Ok(ft) = f(trial) {
                if ft.is_finite() && (ft.norm() < r || lambda < 0.01) {
                    z = trial;
                    fz = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: it,
                best: best.0,
                residual: best.1,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        best: best.0,
        residual: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn affine_in_one_step() {
        let target = c(1.0, -2.0);
        let r = complex_newton(|t| Ok(t - target), c(0.0, 0.0), 1e-8, 5).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.root - target).norm() < 1e-8);
    }

    #[test]
    fn quadratic_picks_nearest_root() {
        let r = complex_newton(|t| Ok(t * t + 1.0), c(0.1, -0.9), 1e-12, 50).unwrap();
        assert!((r.root - c(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn stalled_derivative_is_no_convergence() {
        match complex_newton(|t| Ok(t * t + 1.0), c(0.0, 0.0), 1e-12, 50) {
            Err(Error::NoConvergence { best, .. }) => assert!(best.norm() < 1e-12),
            other => panic!("expected no-convergence, got {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_carries_best() {
        match complex_newton(|t| Ok(t.exp() - 1e-300), c(0.0, 0.0), 0.0, 3) {
            Err(Error::NoConvergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("expected no-convergence, got {other:?}"),
        }
    }
}
