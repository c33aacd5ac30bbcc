//! Discrete off-diagonal fractional calculus on truncated uniform grids.

pub mod config;
pub mod error;
pub mod fields;
pub mod io;
pub mod norms;
pub mod operators;
pub mod report;
mod singular;
pub mod special;
pub mod spectral;
pub mod testlib;
pub mod verify;

pub use error::{FracError, Result};
pub use fields::{make_grid, pair_od, pair_scalar, GridSpec, OffDiagonalField, Provenance, ScalarField};
