//! Pseudo-spectral solver for a 2D incompressible fluid carrying rod-like
//! particles whose orientation density obeys a nonlinear Smoluchowski
//! equation, together with Littlewood-Paley instrumentation of the run.
//!
//! The numerical core is generic over [`Scalar`] (`f32` / `f64`); the
//! aliases below fix the double-precision types used by the driver.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod coupled;
pub mod driver;
pub mod error;
pub mod fiber;
mod fft;
pub mod fluid;
pub mod kinetic;
pub mod lp;
pub mod monitor;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use rustfft::num_complex::Complex;

pub type Field2D = lp::SpectralField2D<f64>;
pub type Grid = lp::Grid2D<f64>;
pub type Ladder = lp::DyadicLadder<f64>;
