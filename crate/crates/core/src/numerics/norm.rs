use serde::{Deserialize, Serialize};

use super::diff::DiffOp;
use super::gridfn::GridFn;
use crate::error::{Error, Result};

/// Exponential weight `α` and derivative order `s` of a `W^{s,∞}_α` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: f64,
    pub s: usize,
}

impl WeightSpec {
    pub fn new(alpha: f64, s: usize) -> Result<Self> {
        if !(alpha >= 0.0) || s > 2 {
            return Err(Error::invalid(format!(
                "weight needs alpha >= 0 and s in {{0,1,2}} (got {alpha}, {s})"
            )));
        }
        Ok(Self { alpha, s })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorm {
    pub value: f64,
    /// The maximizer sits on the last node: the truncation height may be
    /// too small for this weight.
    pub tail_warning: bool,
}

/// `max_{j ≤ s} max_nodes |e^{αy} ∂^j_y f|`, evaluated on the nodes only.
pub fn weighted_sup_norm(f: &GridFn, w: WeightSpec) -> WeightedNorm {
    let nodes = f.nodes();
    let last = nodes.len() - 1;
    let weights: Vec<f64> = nodes.iter().map(|&y| (w.alpha * y).exp()).collect();
    let mut best = 0.0;
    let mut at = 0;
    let mut scan = |vals: &[num_complex::Complex64]| {
        for (j, v) in vals.iter().enumerate() {
            let m = weights[j] * v.norm();
            if m > best {
                best = m;
                at = j;
            }
        }
    };
    scan(f.values());
    for order in 1..=w.s {
        if let Ok(op) = DiffOp::new(f.grid(), order) {
            scan(&op.apply(f.values()));
        }
    }
    WeightedNorm {
        value: best,
        tail_warning: best > 0.0 && at == last,
    }
}

/// Weighted sup of raw samples (the `s = 0` case without building a [`GridFn`]).
pub fn weighted_sup(nodes: &[f64], values: &[num_complex::Complex64], alpha: f64) -> f64 {
    nodes
        .iter()
        .zip(values)
        .map(|(&y, v)| (alpha * y).exp() * v.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::build_stretched_grid;
    use num_complex::Complex64;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn decaying_exponential_peaks_at_wall() {
        let g = build_stretched_grid(20.0, 200, 2.0).unwrap().shared();
        let f = GridFn::from_fn(g, |y| c((-2.0 * y).exp())).unwrap();
        let n = weighted_sup_norm(&f, WeightSpec::new(1.0, 0).unwrap());
        assert!((n.value - 1.0).abs() < 1e-14);
        assert!(!n.tail_warning);
    }

    #[test]
    fn zero_has_zero_norm() {
        let g = build_stretched_grid(20.0, 50, 1.0).unwrap().shared();
        let f = GridFn::zeros(g);
        for s in 0..=2 {
            assert_eq!(weighted_sup_norm(&f, WeightSpec::new(0.7, s).unwrap()).value, 0.0);
        }
    }

    #[test]
    fn weight_cancelling_decay_flags_tail() {
        let g = build_stretched_grid(20.0, 200, 1.0).unwrap().shared();
        let f = GridFn::from_fn(g, |y| c(y * (-y).exp())).unwrap();
        let n = weighted_sup_norm(&f, WeightSpec::new(1.0, 0).unwrap());
        assert!((n.value - 20.0).abs() < 1e-9);
        assert!(n.tail_warning);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(WeightSpec::new(-0.1, 0).is_err());
        assert!(WeightSpec::new(0.1, 3).is_err());
    }
}
