//! Banded complex linear systems: LU with partial pivoting, gbtrf-style.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square band matrix with `kl` sub- and `ku` superdiagonals.
///
/// Row `i` keeps columns `i-kl ..= i+kl+ku`; the extra `kl` columns hold
/// fill-in created by row swaps during factorization.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, 0, 0);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            ZERO
        }
    }

    /// Panics when `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(
            i < self.n && j < self.n && self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn clear_row(&mut self, i: usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku).min(self.n - 1);
        for j in lo..=hi {
            let k = self.idx(i, j);
            self.data[k] = ZERO;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<BandLu> {
        BandLu::new(self.clone())
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    a: BandMatrix,
    pivots: Vec<usize>,
    multipliers: Vec<Complex64>,
    condition: f64,
}

impl BandLu {
    fn new(mut a: BandMatrix) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let scale = a.max_abs();
        if n == 0 || scale == 0.0 {
            return Err(Error::NumericFailure {
                message: "zero band matrix".into(),
                condition: f64::INFINITY,
            });
        }
        let mut pivots = Vec::with_capacity(n);
        let mut multipliers = vec![ZERO; n * kl.max(1)];
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0_f64);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = a.data[a.idx(k, k)].norm();
            for i in k + 1..=last_row {
                let v = a.data[a.idx(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots.push(p);
            if best <= 1e3 * f64::EPSILON * scale {
                return Err(Error::NumericFailure {
                    message: format!("band matrix singular to tolerance at pivot {k}"),
                    condition: if best == 0.0 { f64::INFINITY } else { scale / best },
                });
            }
            pmin = pmin.min(best);
            pmax = pmax.max(best);
            if p != k {
                for j in k..=last_col {
                    let (ik, ip) = (a.idx(k, j), a.idx(p, j));
                    a.data.swap(ik, ip);
                }
            }
            let pivot = a.data[a.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = a.idx(i, k);
                let m = a.data[ik] / pivot;
                a.data[ik] = ZERO;
                multipliers[k * kl + (i - k - 1)] = m;
                if m == ZERO {
                    continue;
                }
                for j in k + 1..=last_col {
                    let akj = a.data[a.idx(k, j)];
                    let ij = a.idx(i, j);
                    a.data[ij] -= m * akj;
                }
            }
        }
        Ok(Self {
            a,
            pivots,
            multipliers,
            condition: pmax / pmin,
        })
    }

    /// Crude condition estimate: ratio of the largest to the smallest pivot.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let a = &self.a;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.multipliers[k * kl + (i - k - 1)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                s -= a.data[a.idx(i, j)] * b[j];
            }
            b[i] = s / a.data[a.idx(i, i)];
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut b = rhs.to_vec();
        self.solve_in_place(&mut b);
        b
    }
}

pub fn solve_banded(matrix: &BandMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if rhs.len() != matrix.dim() {
        return Err(Error::invalid(format!(
            "rhs has {} entries for a {}x{} system",
            rhs.len(),
            matrix.dim(),
            matrix.dim()
        )));
    }
    Ok(matrix.factor()?.solve(rhs))
}

/// `‖Ax − b‖ / (‖A‖‖x‖ + ‖b‖)` in the sup norm.
pub fn relative_residual(matrix: &BandMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let ax = matrix.mul_vec(x);
    let sup = |v: &[Complex64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let r: Vec<Complex64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    sup(&r) / (matrix.max_abs() * sup(x) + sup(b)).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_returns_rhs() {
        let m = BandMatrix::identity(5);
        let r: Vec<_> = (0..5).map(|k| c(k as f64, -1.0)).collect();
        assert_eq!(solve_banded(&m, &r).unwrap(), r);
    }

    #[test]
    fn diagonal_two_by_two() {
        let mut m = BandMatrix::new(2, 0, 0);
        m.set(0, 0, c(2.0, 0.0));
        m.set(1, 1, c(0.0, 4.0));
        let x = solve_banded(&m, &[c(2.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_tridiagonal_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200;
        let mut m = BandMatrix::new(n, 1, 1);
        for i in 0..n {
            m.set(i, i, c(4.0 + rng.random::<f64>(), rng.random::<f64>()));
            if i > 0 {
                m.set(i, i - 1, c(rng.random::<f64>() - 0.5, rng.random::<f64>()));
            }
            if i + 1 < n {
                m.set(i, i + 1, c(rng.random::<f64>(), rng.random::<f64>() - 0.5));
            }
        }
        let known: Vec<_> = (0..n).map(|_| c(rng.random(), rng.random())).collect();
        let b = m.mul_vec(&known);
        let x = solve_banded(&m, &b).unwrap();
        let err = x.iter().zip(&known).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(relative_residual(&m, &x, &b) < 1e-14);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // Needs row swaps: leading entry is zero.
        let n = 6;
        let mut m = BandMatrix::new(n, 2, 1);
        for i in 0..n {
            if i > 0 {
                m.set(i, i - 1, c(1.0, 0.5));
            }
            if i > 1 {
                m.set(i, i - 2, c(-0.3, 0.0));
            }
            if i + 1 < n {
                m.set(i, i + 1, c(2.0, 0.0));
            }
        }
        m.set(n - 1, n - 1, c(1.0, 0.0));
        let known: Vec<_> = (0..n).map(|k| c(1.0 + k as f64, 0.5)).collect();
        let b = m.mul_vec(&known);
        let x = solve_banded(&m, &b).unwrap();
        for (a, b) in x.iter().zip(&known) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_reports_condition() {
        let mut m = BandMatrix::new(3, 1, 1);
        m.set(0, 0, c(1.0, 0.0));
        m.set(1, 0, c(1.0, 0.0));
        m.set(2, 2, c(1.0, 0.0));
        match solve_banded(&m, &[c(1.0, 0.0); 3]) {
            Err(Error::NumericFailure { condition, .. }) => assert!(condition > 1e12),
            other => panic!("expected numeric failure, got {other:?}"),
        }
    }
}
