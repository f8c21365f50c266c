//! Floating-point abstraction shared by every solver component.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar type the solver is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count or index.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Fixed block size for deterministic chunked reductions.
pub(crate) const REDUCE_CHUNK: usize = 4096;

/// Sum with a fixed association order, independent of the rayon thread count.
pub(crate) fn det_sum<T: Scalar, F>(n: usize, term: F) -> T
where
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(n);
            let mut acc = T::zero();
            for i in lo..hi {
                acc = acc + term(i);
            }
            acc
        })
        .collect();
    partial.into_iter().fold(T::zero(), |a, b| a + b)
}

/// Maximum with NaN propagation, deterministic for any thread count.
pub(crate) fn det_max<T: Scalar, F>(n: usize, term: F) -> T
where
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    let chunks = n.div_ceil(REDUCE_CHUNK);
    let partial: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(n);
            let mut acc = T::neg_infinity();
            for i in lo..hi {
                let x = term(i);
                if x.is_nan() || x > acc {
                    acc = x;
                }
                if acc.is_nan() {
                    break;
                }
            }
            acc
        })
        .collect();
    partial.into_iter().fold(T::neg_infinity(), |a, b| if a.is_nan() || b.is_nan() { T::nan() } else { a.max(b) })
}
