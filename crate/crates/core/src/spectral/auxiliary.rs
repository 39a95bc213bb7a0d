//! The real auxiliary eigenproblem
//! `(1/(z²+1))u″ + (6z/(z²+1)²)u′ + (6/(z²+1)²)u = (α/C)u` with decay
//! conditions, written in Sturm–Liouville form
//! `((1+z²)³u′)′ + 6(1+z²)²u = λ(1+z²)⁴u` and symmetrized.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AuxiliarySpectrum {
    pub c: f64,
    /// Isolated positive eigenvalues `α`, ascending.
    pub alphas: Vec<f64>,
    /// Eigenvectors of the symmetrized matrix, one per entry of `alphas`.
    pub vectors: Vec<DVector<f64>>,
    /// Interior nodes of the discretization.
    pub z: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl AuxiliarySpectrum {
    /// `‖Su − (α/C)u‖` for the `k`-th pair.
    pub fn eigen_residual(&self, k: usize) -> f64 {
        let u = &self.vectors[k];
        (&self.matrix * u - u * (self.alphas[k] / self.c)).norm()
    }

    /// Seeds for the profile search, `τ = −e^{iπ/4}√α`.
    ///
    /// The substitution `z = √(−τ)s` carries the derivative of the profile
    /// equation to the auxiliary operator with `α = −iτ²`; the branch with
    /// `Im τ < 0` is kept.
    pub fn tau_seeds(&self) -> Vec<Complex64> {
        let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        self.alphas.iter().map(|&a| -rot * a.sqrt()).collect()
    }
}

/// Discretizes on `count` uniform interior nodes of `(−l, l)` with
/// homogeneous Dirichlet ends and returns the positive eigenvalues.
pub fn auxiliary_eigenproblem(c: f64, half_width: f64, count: usize) -> Result<AuxiliarySpectrum> {
    if !(c > 0.0) {
        return Err(Error::precondition(format!("C must be positive, got {c}")));
    }
    if !(half_width > 0.0) || count < 8 {
        return Err(Error::invalid("auxiliary grid needs half_width > 0 and count >= 8"));
    }
    let h = 2.0 * half_width / (count + 1) as f64;
    let z: Vec<f64> = (1..=count).map(|j| -half_width + h * j as f64).collect();
    let p = |z: f64| (1.0 + z * z).powi(3);
    let q = |z: f64| 6.0 * (1.0 + z * z).powi(2);
    let w = |z: f64| (1.0 + z * z).powi(4);
    let mut s = DMatrix::<f64>::zeros(count, count);
    for j in 0..count {
        let zj = z[j];
        let pl = p(zj - h / 2.0);
        let pr = p(zj + h / 2.0);
        let sw = w(zj).sqrt();
        s[(j, j)] = (-(pl + pr) / (h * h) + q(zj)) / (sw * sw);
        if j + 1 < count {
            let off = pr / (h * h) / (sw * w(z[j + 1]).sqrt());
            s[(j, j + 1)] = off;
            s[(j + 1, j)] = off;
        }
    }
    let eig = SymmetricEigen::new(s.clone());
    let mut pairs: Vec<(f64, DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-8)
        .map(|(k, &l)| (l * c, eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (alphas, vectors) = pairs.into_iter().unzip();
    Ok(AuxiliarySpectrum {
        c,
        alphas,
        vectors,
        z,
        matrix: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound_state_near_c() {
        let s = auxiliary_eigenproblem(1.0, 8.0, 600).unwrap();
        assert_eq!(s.alphas.len(), 1);
        assert!((s.alphas[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn eigenvalues_scale_with_c() {
        let a = auxiliary_eigenproblem(0.7, 8.0, 300).unwrap();
        let b = auxiliary_eigenproblem(1.4, 8.0, 300).unwrap();
        for (x, y) in a.alphas.iter().zip(&b.alphas) {
            assert!((y - 2.0 * x).abs() <= 1e-12 * y.abs());
        }
    }

    #[test]
    fn eigenvector_residual_is_small() {
        let s = auxiliary_eigenproblem(2.0, 8.0, 400).unwrap();
        assert!(s.eigen_residual(0) <= 1e-8 * s.vectors[0].norm());
    }

    #[test]
    fn refinement_keeps_four_digits() {
        let a = auxiliary_eigenproblem(1.0, 8.0, 600).unwrap().alphas[0];
        let b = auxiliary_eigenproblem(1.0, 8.0, 1200).unwrap().alphas[0];
        assert!((a - b).abs() / b < 5e-4, "{a} vs {b}");
    }

    #[test]
    fn rejects_nonpositive_c() {
        assert!(auxiliary_eigenproblem(0.0, 8.0, 100).is_err());
    }
}
