//! Multi-axis complex FFTs over row-major 3-index arrays.
//!
//! Forward transforms are normalized by `1/N` so that coefficients are the
//! Fourier amplitudes: `u(x) = sum_k c_k exp(i k.x)`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

struct AxisPlan<T: Scalar> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

/// Transform plans for an array of shape `[d0, d1, d2]` (last index fastest).
pub(crate) struct Fft3<T: Scalar> {
    shape: [usize; 3],
    plans: [AxisPlan<T>; 3],
}

impl<T: Scalar> Fft3<T> {
    pub fn new(shape: [usize; 3]) -> Self {
        let mut planner = FftPlanner::<T>::new();
        let mut plan = |n: usize| AxisPlan { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) };
        let plans = [plan(shape[0]), plan(shape[1]), plan(shape[2])];
        Self { shape, plans }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    /// Forward transform over the selected axes, normalized by the product of their lengths.
    pub fn forward_axes(&self, data: &mut [Complex<T>], axes: &[usize]) {
        let mut norm = 1usize;
        for &a in axes {
            self.transform_axis(data, a, true);
            norm *= self.shape[a];
        }
        if norm > 1 {
            let s = T::one() / T::of_usize(norm);
            data.par_iter_mut().for_each(|c| *c = *c * s);
        }
    }

    pub fn inverse_axes(&self, data: &mut [Complex<T>], axes: &[usize]) {
        for &a in axes {
            self.transform_axis(data, a, false);
        }
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.forward_axes(data, &[0, 1, 2]);
    }

    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.inverse_axes(data, &[0, 1, 2]);
    }

    /// Real values to normalized coefficients.
    pub fn forward_real(&self, values: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(values.len(), self.len());
        let mut data: Vec<Complex<T>> = values.par_iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward(&mut data);
        data
    }

    /// Coefficients to real values (imaginary round-off discarded).
    pub fn inverse_real(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        let mut data = coeffs.to_vec();
        self.inverse(&mut data);
        data.into_par_iter().map(|c| c.re).collect()
    }

    fn transform_axis(&self, data: &mut [Complex<T>], axis: usize, forward: bool) {
        let n = self.shape[axis];
        if n == 1 {
            return;
        }
        let plan = if forward { &self.plans[axis].fwd } else { &self.plans[axis].inv };
        let scratch_len = plan.get_inplace_scratch_len();
        if axis == 2 {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex::new(T::zero(), T::zero()); scratch_len],
                |scratch, line| plan.process_with_scratch(line, scratch),
            );
            return;
        }
        let [d0, d1, d2] = self.shape;
        let strides = [d1 * d2, d2, 1];
        let (b, c) = match axis {
            0 => (1, 2),
            _ => (0, 2),
        };
        let dc = self.shape[c];
        let (sa, sb, sc) = (strides[axis], strides[b], strides[c]);
        // gather lines along `axis` into contiguous rows
        let mut tmp = vec![Complex::new(T::zero(), T::zero()); data.len()];
        {
            let src: &[Complex<T>] = data;
            tmp.par_chunks_mut(n).enumerate().for_each(|(l, row)| {
                let base = (l / dc) * sb + (l % dc) * sc;
                for (ia, x) in row.iter_mut().enumerate() {
                    *x = src[base + ia * sa];
                }
            });
        }
        tmp.par_chunks_mut(n).for_each_init(
            || vec![Complex::new(T::zero(), T::zero()); scratch_len],
            |scratch, line| plan.process_with_scratch(line, scratch),
        );
        let shape = self.shape;
        data.par_chunks_mut(d2).enumerate().for_each(|(r, out)| {
            let i0 = r / d1;
            let i1 = r % d1;
            for (i2, x) in out.iter_mut().enumerate() {
                let idx = [i0, i1, i2];
                let l = idx[b] * shape[c] + idx[c];
                *x = tmp[l * n + idx[axis]];
            }
        });
        let _ = d0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_all_axes() {
        let fft = Fft3::<f64>::new([4, 8, 16]);
        let vals: Vec<f64> = (0..fft.len()).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let c = fft.forward_real(&vals);
        let back = fft.inverse_real(&c);
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_expected_bin() {
        let (d0, d1, d2) = (8usize, 4usize, 4usize);
        let fft = Fft3::<f64>::new([d0, d1, d2]);
        let mut vals = vec![0.0; d0 * d1 * d2];
        for i0 in 0..d0 {
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    let x = 2.0 * std::f64::consts::PI * i0 as f64 / d0 as f64;
                    vals[(i0 * d1 + i1) * d2 + i2] = (3.0 * x).cos();
                }
            }
        }
        let c = fft.forward_real(&vals);
        assert!((c[3 * d1 * d2].re - 0.5).abs() < 1e-14);
        assert!((c[5 * d1 * d2].re - 0.5).abs() < 1e-14);
        let total: f64 = c.iter().map(|z| z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
