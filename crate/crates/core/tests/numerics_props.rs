use num_complex::Complex64;
use prandtl_lab::numerics::norm::weighted_sup;
use prandtl_lab::numerics::quad::cumulative_trapezoid_real;
use prandtl_lab::numerics::{build_stretched_grid, fit_exponent, solve_banded, BandMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn stretched_grid_is_increasing_and_pinned(y_max in 0.5..80.0f64, count in 5usize..400, stretch in 0.0..6.0f64) {
        let g = build_stretched_grid(y_max, count, stretch).unwrap();
        let n = g.nodes();
        prop_assert_eq!(n.len(), count);
        prop_assert_eq!(n[0], 0.0);
        prop_assert_eq!(n[count - 1], y_max);
        prop_assert!(n.windows(2).all(|w| w[1] > w[0]));
        if stretch > 0.0 {
            prop_assert!(n.windows(3).all(|w| w[2] - w[1] >= (w[1] - w[0]) * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn line_fit_recovers_exact_lines(rate in -50.0..50.0f64, b in -10.0..10.0f64, n in 3usize..40) {
        let xs: Vec<f64> = (0..n).map(|i| 0.1 + i as f64 * 0.37).collect();
        let ys: Vec<f64> = xs.iter().map(|x| rate * x + b).collect();
        let fit = fit_exponent(&xs, &ys).unwrap();
        prop_assert!((fit.rate - rate).abs() <= 1e-9 * (1.0 + rate.abs()));
        prop_assert!((fit.intercept - b).abs() <= 1e-8 * (1.0 + b.abs() + rate.abs()));
    }

    #[test]
    fn banded_solve_inverts_mul(n in 5usize..60, kl in 0usize..4, ku in 0usize..4, seed in 0u64..1000) {
        let mut m = BandMatrix::new(n, kl, ku);
        let mut s = seed as f64 + 1.0;
        let mut next = || { s = (s * 16807.0) % 2147483647.0; s / 2147483647.0 - 0.5 };
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                m.set(i, j, Complex64::new(next(), next()));
            }
            m.add(i, i, Complex64::new(4.0, 0.0));
        }
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        let b = m.mul_vec(&x);
        let got = solve_banded(&m, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            prop_assert!((g - e).norm() < 1e-10);
        }
    }

    #[test]
    fn trapezoid_is_exact_on_lines(a in -5.0..5.0f64, b in -5.0..5.0f64, count in 5usize..200, stretch in 0.0..4.0f64) {
        let g = build_stretched_grid(10.0, count, stretch).unwrap();
        let y = g.nodes();
        let f: Vec<f64> = y.iter().map(|y| a + b * y).collect();
        let int = cumulative_trapezoid_real(y, &f);
        for (yi, v) in y.iter().zip(&int) {
            let exact = a * yi + 0.5 * b * yi * yi;
            prop_assert!((v - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn weighted_sup_is_homogeneous(re in -3.0..3.0f64, im in -3.0..3.0f64, alpha in 0.0..2.0f64) {
        let g = build_stretched_grid(20.0, 101, 2.0).unwrap();
        let v: Vec<Complex64> = g.nodes().iter().map(|y| Complex64::new(y * (-y).exp(), (-2.0 * y).exp())).collect();
        let c = Complex64::new(re, im);
        let scaled: Vec<Complex64> = v.iter().map(|x| x * c).collect();
        let lhs = weighted_sup(g.nodes(), &scaled, alpha);
        let rhs = c.norm() * weighted_sup(g.nodes(), &v, alpha);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }
}
