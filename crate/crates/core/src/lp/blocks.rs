//! Littlewood-Paley block projectors and physical-space block stacks.

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::lp::field::SpectralField2D;
use crate::lp::ladder::{DyadicLadder, LOW_BLOCK};
use crate::scalar::Scalar;

/// Multiply coefficients laid out as `[outer][kx][ky]` by an x-multiplier of length `nx*ny`.
pub(crate) fn apply_x_weights<T: Scalar>(coeffs: &[Complex<T>], weights: &[T]) -> Vec<Complex<T>> {
    let n = weights.len();
    coeffs.par_iter().enumerate().map(|(i, &c)| c * weights[i % n]).collect()
}

/// `Delta_q u`. Blocks outside the ladder are zero; asking for one logs a warning.
pub fn delta_q<T: Scalar>(u: &SpectralField2D<T>, q: i32) -> SpectralField2D<T> {
    match u.grid().ladder().block_weights(q) {
        Some(w) => u.apply_multiplier(w),
        None => {
            log::warn!("delta_q: block {q} outside ladder range [-1, {}]", u.grid().ladder().q_max());
            SpectralField2D::zeros(u.grid())
        }
    }
}

/// `S_q u`, the low-pass projector `chi(2^-q D)`; zero for `q < 0`.
pub fn s_q<T: Scalar>(u: &SpectralField2D<T>, q: i32) -> SpectralField2D<T> {
    match u.grid().ladder().low_pass_weights(q) {
        Some(w) => u.apply_multiplier(w),
        None => SpectralField2D::zeros(u.grid()),
    }
}

/// Physical values of every block of one field: index `q - LOW_BLOCK`.
/// `None` marks a block whose coefficients vanish identically.
pub(crate) struct BlockStack<T: Scalar> {
    blocks: Vec<Option<Vec<T>>>,
    len: usize,
}

impl<T: Scalar> BlockStack<T> {
    pub fn build(coeffs: &[Complex<T>], ladder: &DyadicLadder<T>, inverse: &(dyn Fn(Vec<Complex<T>>) -> Vec<T> + Sync)) -> Self {
        let blocks = ladder
            .blocks()
            .map(|q| {
                let w = ladder.block_weights(q).expect("ladder block");
                let c = apply_x_weights(coeffs, w);
                if c.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                    None
                } else {
                    Some(inverse(c))
                }
            })
            .collect();
        Self { blocks, len: coeffs.len() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn block(&self, q: i32) -> Option<&[T]> {
        if q < LOW_BLOCK {
            return None;
        }
        self.blocks.get((q - LOW_BLOCK) as usize).and_then(|b| b.as_deref())
    }

    fn q_hi(&self) -> i32 {
        LOW_BLOCK + self.blocks.len() as i32 - 1
    }
}

/// `out[i] += a[i mod |a|] * b[i mod |b|]` (x-only operands broadcast over the outer index).
pub(crate) fn mul_acc<T: Scalar>(out: &mut [T], a: &[T], b: &[T]) {
    let (na, nb) = (a.len(), b.len());
    out.par_iter_mut().enumerate().for_each(|(i, o)| *o = *o + a[i % na] * b[i % nb]);
}

/// `sum_q S_{q-1}a * Delta_q b` evaluated pointwise (before any truncation).
pub(crate) fn paraproduct_phys<T: Scalar>(a: &BlockStack<T>, b: &BlockStack<T>) -> Vec<T> {
    let n = a.len().max(b.len());
    let na = a.len();
    let mut out = vec![T::zero(); n];
    let mut low = vec![T::zero(); na];
    let mut low_nonzero = false;
    for q in LOW_BLOCK..=b.q_hi().max(a.q_hi()) {
        // low = S_{q-1} a = sum_{q' <= q-2} Delta_q' a
        if let Some(blk) = a.block(q - 2) {
            low.par_iter_mut().zip(blk.par_iter()).for_each(|(l, &x)| *l = *l + x);
            low_nonzero = true;
        }
        if let (true, Some(bq)) = (low_nonzero, b.block(q)) {
            mul_acc(&mut out, &low, bq);
        }
    }
    out
}

/// `sum_{|q-q'| <= 1} Delta_q' a * Delta_q b` evaluated pointwise.
pub(crate) fn remainder_phys<T: Scalar>(a: &BlockStack<T>, b: &BlockStack<T>) -> Vec<T> {
    let n = a.len().max(b.len());
    let mut out = vec![T::zero(); n];
    for q in LOW_BLOCK..=b.q_hi() {
        let Some(bq) = b.block(q) else { continue };
        for qa in q - 1..=q + 1 {
            if let Some(aq) = a.block(qa) {
                mul_acc(&mut out, aq, bq);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::grid::{Grid2D, GridSpec2D};

    #[test]
    fn block_of_pure_mode() {
        let g = Grid2D::<f64>::new(GridSpec2D::new(64, 64).unwrap()).unwrap();
        for q in 1..=3 {
            let k = f64::from(1 << q);
            let u = SpectralField2D::from_fn(&g, |x, _| (k * x).cos());
            let d = delta_q(&u, q);
            // phi(2^-q * 2^q) = phi(1) = 1
            assert!(d.minus(&u).unwrap().max_abs_coeff() < 1e-15);
            assert!(delta_q(&u, q + 3).max_abs_coeff() < 1e-15);
            // chi(2^-(q-4) 2^q) = chi(16) = 0 once q - 4 >= 0
            if q >= 4 {
                assert!(s_q(&u, q - 4).max_abs_coeff() < 1e-15);
            }
        }
    }

    #[test]
    fn out_of_range_block_is_zero() {
        let g = Grid2D::<f64>::new(GridSpec2D::new(16, 16).unwrap()).unwrap();
        let u = SpectralField2D::from_fn(&g, |x, y| x.sin() + y.cos());
        assert!(delta_q(&u, 40).is_zero());
        assert!(delta_q(&u, -5).is_zero());
        assert!(s_q(&u, -1).is_zero());
    }
}
