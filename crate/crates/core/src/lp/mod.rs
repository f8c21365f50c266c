//! Periodic spectral fields, the Littlewood-Paley ladder, paraproducts and
//! the Lebesgue/Besov norms built from them.
//!
//! The whole plane is modelled by the periodic box `[0, 2pi)^2`. Every
//! nonlinear product is truncated by the dealiasing rule of the grid.

pub mod blocks;
pub mod bony;
pub mod field;
pub mod grid;
pub mod ladder;
pub mod norms;

pub use blocks::{delta_q, s_q};
pub use bony::{paraproduct, remainder, BonySplit};
pub use field::{Collocation2D, SpectralField2D};
pub use grid::{Grid2D, GridSpec2D};
pub use ladder::{chi_profile, phi_profile, DyadicLadder, LOW_BLOCK};
pub use norms::{besov_norm, besov_seminorm, heat_propagate, lebesgue_norm, BesovKind};

use std::sync::Arc;

use crate::error::Result;
use crate::scalar::Scalar;

/// `build_ladder`: construct a grid and return its cached dyadic ladder.
pub fn build_ladder<T: Scalar>(spec: GridSpec2D) -> Result<DyadicLadder<T>> {
    DyadicLadder::build(&spec)
}

pub type GridRef<T> = Arc<Grid2D<T>>;
