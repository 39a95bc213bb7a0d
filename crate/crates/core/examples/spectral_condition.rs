//! Solves the shear-layer spectral condition for a few values of C and
//! compares τ with √C·e^{−3iπ/4}.
//!
//! `cargo run --example spectral_condition [C ...]`

use num_complex::Complex64;
use prandtl_lab::spectral::{auxiliary_eigenproblem, solve_spectral, SpectralConfig};

fn main() -> prandtl_lab::Result<()> {
    let cs: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("C must be a number")).collect();
    let cs = if cs.is_empty() { vec![0.5, 1.0, 2.0] } else { cs };
    let cfg = SpectralConfig::default();
    println!("{:>6} {:>28} {:>10} {:>10} {:>10} {:>8} {:>8}", "C", "tau", "|tau-ref|", "mismatch", "residual", "decay c", "r2");
    for c in cs {
        let s = solve_spectral(c, &cfg)?;
        let reference = c.sqrt() * Complex64::from_polar(1.0, -0.75 * std::f64::consts::PI);
        println!(
            "{:>6.3} {:>13.9}{:>+13.9}i {:>10.2e} {:>10.2e} {:>10.2e} {:>8.4} {:>8.5}",
            c,
            s.tau.re,
            s.tau.im,
            (s.tau - reference).norm(),
            s.bc_mismatch,
            s.ode_residual,
            s.decay_fit.c,
            s.decay_fit.r_squared
        );
        let aux = auxiliary_eigenproblem(c, 8.0, 400)?;
        let first: Vec<String> = aux.alphas.iter().take(4).map(|a| format!("{a:.6}")).collect();
        println!("       auxiliary eigenvalues: {}", first.join(", "));
    }
    Ok(())
}
