//! Inverts the transport operator `T w = u₀w − u₀′∫₀ʸw` on random smooth data
//! and checks the round trip and the closed-form inverse.
//!
//! `cargo run --example volterra_inversion [seed]`

use num_complex::Complex64;
use prandtl_lab::base_flow::{analytic_profile, CatalogId, CatalogParams};
use prandtl_lab::evolution::{apply_transport, invert_transport, invert_transport_closed, FlowSlice};
use prandtl_lab::numerics::{build_stretched_grid, GridFn, XGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> prandtl_lab::Result<()> {
    let seed = std::env::args().nth(1).map(|s| s.parse().expect("seed must be an integer")).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = build_stretched_grid(20.0, 801, 3.0)?;
    let flow = analytic_profile(CatalogId::CriticalShear, CatalogParams::default(), XGrid::uniform(1.0, 11)?, g.clone())?;
    let slice = FlowSlice::at(&flow, 0.0, &g);
    for trial in 0..5 {
        let (a, b, k) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.3..2.0));
        let r = GridFn::from_fn(g.shared(), |y| Complex64::new(a, b) * (k * y).sin().powi(2) * (-0.5 * y * y).exp())?;
        let w = invert_transport(&r, &slice)?;
        let back = apply_transport(&w, &slice)?;
        let closed = invert_transport_closed(&r, &slice)?;
        println!(
            "trial {trial}: round trip {:.2e}, closed form vs discrete {:.2e}",
            (&back - &r).max_abs() / r.max_abs(),
            (&closed - &w).max_abs() / w.max_abs()
        );
    }
    Ok(())
}
