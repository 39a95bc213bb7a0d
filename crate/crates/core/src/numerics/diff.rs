//! Finite-difference derivatives on nonuniform grids.

use num_complex::Complex64;

use super::grid::Grid;
use super::gridfn::GridFn;
use crate::error::{Error, Result};

/// Weights of the `order`-th derivative at `x0` for samples at `xs`
/// (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Precomputed stencils for one derivative order on one grid.
///
/// Order 1 uses three points (centered in the interior, one-sided at the
/// ends); orders 2 and 3 use five points, shifted near the ends. Every
/// stencil is at least second-order accurate on a smooth nonuniform grid.
#[derive(Debug, Clone)]
pub struct DiffOp {
    width: usize,
    starts: Vec<usize>,
    weights: Vec<f64>,
}

impl DiffOp {
    pub fn new(grid: &Grid, order: usize) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::invalid(format!("derivative order must be 1, 2 or 3, got {order}")));
        }
        let n = grid.len();
        if n < order + 2 {
            return Err(Error::invalid(format!(
                "order-{order} derivative needs at least {} nodes, grid has {n}",
                order + 2
            )));
        }
        let width = match order {
            1 => 3,
            2 if n < 5 => 4,
            _ => 5,
        };
        let nodes = grid.nodes();
        let mut starts = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n * width);
        for j in 0..n {
            let start = j.saturating_sub(width / 2).min(n - width);
            starts.push(start);
            weights.extend(fd_weights(nodes[j], &nodes[start..start + width], order));
        }
        Ok(Self {
            width,
            starts,
            weights,
        })
    }

    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.starts
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let w = &self.weights[j * self.width..(j + 1) * self.width];
                w.iter()
                    .zip(&values[s..s + self.width])
                    .map(|(&wk, &v)| v * wk)
                    .sum()
            })
            .collect()
    }

    pub fn apply_real(&self, values: &[f64]) -> Vec<f64> {
        self.starts
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let w = &self.weights[j * self.width..(j + 1) * self.width];
                w.iter().zip(&values[s..s + self.width]).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Stencil `(first column, weights)` of row `j`.
    pub fn row(&self, j: usize) -> (usize, &[f64]) {
        (
            self.starts[j],
            &self.weights[j * self.width..(j + 1) * self.width],
        )
    }
}

pub fn derivative(f: &GridFn, order: usize) -> Result<GridFn> {
    let op = DiffOp::new(f.grid(), order)?;
    GridFn::new(f.grid().clone(), op.apply(f.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::{build_stretched_grid, Grid};
    use std::sync::Arc;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn second_derivative_of_quadratic_is_exact() {
        let g = Arc::new(Grid::uniform(0.0, 10.0, 21).unwrap());
        let f = GridFn::from_fn(g, |y| c(y * y)).unwrap();
        let d2 = derivative(&f, 2).unwrap();
        for v in d2.values() {
            assert!((v - c(2.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let g = build_stretched_grid(5.0, 40, 2.0).unwrap().shared();
        let f = GridFn::from_fn(g, |_| Complex64::new(3.0, -1.0)).unwrap();
        for order in 1..=3 {
            assert!(derivative(&f, order).unwrap().max_abs() < 1e-9);
        }
    }

    fn max_err(n: usize, order: usize) -> f64 {
        let g = build_stretched_grid(4.0, n, 1.5).unwrap().shared();
        let f = GridFn::from_fn(g, |y| c((-y).exp())).unwrap();
        let d = derivative(&f, order).unwrap();
        let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
        d.nodes()
            .iter()
            .zip(d.values())
            .map(|(&y, v)| (v - c(sign * (-y).exp())).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn exponential_derivatives_converge_at_second_order() {
        for order in 1..=3 {
            let e1 = max_err(81, order);
            let e2 = max_err(161, order);
            let rate = (e1 / e2).log2();
            assert!(rate > 1.8, "order {order}: rate {rate} ({e1:e} -> {e2:e})");
        }
    }

    #[test]
    fn too_few_nodes_is_rejected() {
        let g = Arc::new(Grid::uniform(0.0, 1.0, 4).unwrap());
        let f = GridFn::zeros(g);
        assert!(derivative(&f, 3).is_err());
        assert!(derivative(&f, 2).is_ok());
        assert!(derivative(&f, 4).is_err());
    }

    #[test]
    fn fornberg_matches_textbook_centered_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
        let w3 = fd_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 3);
        let expect = [-0.5, 1.0, 0.0, -1.0, 0.5];
        for (a, b) in w3.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
