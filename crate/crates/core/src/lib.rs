//! Numerical laboratory for the linearized Prandtl equation around base
//! flows with a non-degenerate critical point: the spectral condition for the
//! shear-layer profile, the unstable quasimode, a single-mode marcher and the
//! high-frequency growth scan.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base_flow;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod numerics;
pub mod quasimode;
pub mod spectral;

pub use error::{Error, Result};
