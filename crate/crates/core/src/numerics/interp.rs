//! Interpolation from fine sample grids.

use num_complex::Complex64;

use super::grid::Grid;

/// Piecewise linear interpolation, constant beyond the ends.
pub fn linear(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    if x <= nodes[0] {
        return values[0];
    }
    if x >= nodes[n - 1] {
        return values[n - 1];
    }
    let j = nodes.partition_point(|&t| t <= x) - 1;
    let t = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
    values[j] * (1.0 - t) + values[j + 1] * t
}

/// Quintic Hermite interpolation of `(f, f', f'')` on one cell, returning
/// the value and the first three derivatives at `x`.
pub fn hermite5(
    grid: &Grid,
    f: &[Complex64],
    df: &[Complex64],
    d2f: &[Complex64],
    x: f64,
) -> [Complex64; 4] {
    let j = grid.locate(x);
    let (x0, x1) = (grid.nodes()[j], grid.nodes()[j + 1]);
    let h = x1 - x0;
    let t = ((x - x0) / h).clamp(0.0, 1.0);
    let basis = quintic_basis(t);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (d, slot) in out.iter_mut().enumerate() {
        let b = &basis[d];
        let s = h.powi(-(d as i32));
        *slot = (f[j] * b[0]
            + df[j] * (h * b[1])
            + d2f[j] * (h * h * b[2])
            + f[j + 1] * b[3]
            + df[j + 1] * (h * b[4])
            + d2f[j + 1] * (h * h * b[5]))
            * s;
    }
    out
}

/// Quintic Hermite basis on [0,1] and its first three t-derivatives.
/// Order: value0, slope0, curvature0, value1, slope1, curvature1.
fn quintic_basis(t: f64) -> [[f64; 6]; 4] {
    // Coefficients in the monomial basis 1, t, ..., t^5.
    const C: [[f64; 6]; 6] = [
        [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
        [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
        [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
        [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
        [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
        [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
    ];
    let mut out = [[0.0; 6]; 4];
    for (b, coeffs) in C.iter().enumerate() {
        for (d, row) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in d..6 {
                let falling: f64 = (0..d).map(|q| (p - q) as f64).product();
                s += coeffs[p] * falling * t.powi((p - d) as i32);
            }
            row[b] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_hits_nodes_and_midpoints() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 2.0, 6.0];
        assert_eq!(linear(&xs, &ys, 1.0), 2.0);
        assert_eq!(linear(&xs, &ys, 2.0), 4.0);
        assert_eq!(linear(&xs, &ys, -1.0), 0.0);
    }

    #[test]
    fn quintic_reproduces_quintic_polynomials() {
        let g = Grid::uniform(-1.0, 2.0, 7).unwrap();
        let p = |x: f64| [
            x.powi(5) - 2.0 * x * x + 1.0,
            5.0 * x.powi(4) - 4.0 * x,
            20.0 * x.powi(3) - 4.0,
            60.0 * x * x,
        ];
        let c = |v: f64| Complex64::new(v, 0.0);
        let f: Vec<_> = g.nodes().iter().map(|&x| c(p(x)[0])).collect();
        let df: Vec<_> = g.nodes().iter().map(|&x| c(p(x)[1])).collect();
        let d2f: Vec<_> = g.nodes().iter().map(|&x| c(p(x)[2])).collect();
        for &x in &[-0.93, 0.1, 0.77, 1.99] {
            let got = hermite5(&g, &f, &df, &d2f, x);
            for d in 0..4 {
                assert!((got[d].re - p(x)[d]).abs() < 1e-10, "x={x} d={d}");
            }
        }
    }
}
