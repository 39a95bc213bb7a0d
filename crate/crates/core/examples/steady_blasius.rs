//! Blasius inflow through the von Mises march and back, against the
//! similarity solution, at increasing ψ-resolution.
//!
//! `cargo run --example steady_blasius`

use prandtl_lab::base_flow::{blasius_round_trip, MisesResolution};

fn main() -> prandtl_lab::Result<()> {
    let base = MisesResolution::default();
    let mut last = f64::NAN;
    for m in [1, 2, 4] {
        let res = MisesResolution {
            n_psi: m * base.n_psi,
            ..base
        };
        let check = blasius_round_trip(res, 201)?;
        println!(
            "n_psi = {:>5}: max relative error {:.3e}{}",
            res.n_psi,
            check.max_error,
            if last.is_nan() { String::new() } else { format!(" (ratio {:.2})", last / check.max_error) }
        );
        last = check.max_error;
    }
    Ok(())
}
