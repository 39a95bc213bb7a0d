use num_complex::Complex64;

use super::gridfn::GridFn;

/// `F(y_j) = ∫_0^{y_j} f` by the composite trapezoid rule.
pub fn cumulative_integral(f: &GridFn) -> GridFn {
    let values = cumulative_trapezoid(f.nodes(), f.values());
    GridFn::new(f.grid().clone(), values).expect("same grid, finite values")
}

pub fn cumulative_trapezoid(nodes: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for j in 1..values.len() {
        acc += 0.5 * (nodes[j] - nodes[j - 1]) * (values[j] + values[j - 1]);
        out.push(acc);
    }
    out
}

pub fn cumulative_trapezoid_real(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(acc);
    for j in 1..values.len() {
        acc += 0.5 * (nodes[j] - nodes[j - 1]) * (values[j] + values[j - 1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::{build_stretched_grid, Grid};
    use std::sync::Arc;

    #[test]
    fn integral_of_one_is_identity() {
        let g = Arc::new(Grid::uniform(0.0, 10.0, 11).unwrap());
        let f = GridFn::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let big_f = cumulative_integral(&f);
        for (&y, v) in big_f.nodes().iter().zip(big_f.values()) {
            assert!((v.re - y).abs() < 1e-13 && v.im == 0.0);
        }
    }

    #[test]
    fn integral_of_linear_is_exact() {
        let g = build_stretched_grid(3.0, 30, 2.0).unwrap().shared();
        let f = GridFn::from_fn(g, |y| Complex64::new(2.0 * y, 0.0)).unwrap();
        let big_f = cumulative_integral(&f);
        for (&y, v) in big_f.nodes().iter().zip(big_f.values()) {
            assert!((v.re - y * y).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let g = Arc::new(Grid::uniform(0.0, 1.0, 9).unwrap());
        assert_eq!(cumulative_integral(&GridFn::zeros(g)).max_abs(), 0.0);
    }
}
