//! Grids, grid functions, finite differences, quadrature, weighted norms,
//! banded solves, complex Newton and line fits.

pub mod banded;
pub mod diff;
pub mod fit;
pub mod grid;
pub mod gridfn;
pub mod interp;
pub mod newton;
pub mod norm;
pub mod quad;

pub use banded::{solve_banded, BandLu, BandMatrix};
pub use diff::{derivative, DiffOp};
pub use fit::{fit_exponent, LineFit};
pub use grid::{build_stretched_grid, Grid, XGrid, YGrid, ZGrid};
pub use gridfn::GridFn;
pub use newton::{complex_newton, NewtonRoot};
pub use norm::{weighted_sup_norm, WeightSpec, WeightedNorm};
pub use quad::cumulative_integral;
