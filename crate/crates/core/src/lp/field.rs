use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::lp::grid::Grid2D;
use crate::scalar::{det_max, det_sum, Scalar};

/// Real scalar field on the periodic box, stored as Fourier amplitudes in
/// flat `[kx][ky]` order (FFT index layout).
#[derive(Clone, Debug)]
pub struct SpectralField2D<T: Scalar> {
    grid: Arc<Grid2D<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralField2D<T> {
    pub fn zeros(grid: &Arc<Grid2D<T>>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn from_coeffs(grid: &Arc<Grid2D<T>>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Exact DFT of collocation values; no band truncation.
    pub fn from_physical(grid: &Arc<Grid2D<T>>, values: &[T]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(Self { grid: grid.clone(), coeffs: grid.fft.forward_real(values) })
    }

    /// Sample `f(x, y)` on the collocation grid and truncate to the dealiased band.
    pub fn from_fn(grid: &Arc<Grid2D<T>>, f: impl Fn(T, T) -> T) -> Self {
        let ny = grid.ny();
        let values: Vec<T> = (0..grid.len()).map(|m| f(grid.x(m / ny), grid.y(m % ny))).collect();
        let mut out = Self { grid: grid.clone(), coeffs: grid.fft.forward_real(&values) };
        out.dealias();
        out
    }

    pub fn grid(&self) -> &Arc<Grid2D<T>> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn to_physical(&self) -> Vec<T> {
        self.grid.fft.inverse_real(&self.coeffs)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Zero every mode outside the dealiased band.
    pub fn dealias(&mut self) {
        let keep = &self.grid.keep;
        self.coeffs.par_iter_mut().zip(keep.par_iter()).for_each(|(c, &k)| {
            if !k {
                *c = Complex::new(T::zero(), T::zero());
            }
        });
    }

    pub fn is_dealiased(&self) -> bool {
        self.coeffs.iter().zip(&self.grid.keep).all(|(c, &k)| k || (c.re == T::zero() && c.im == T::zero()))
    }

    /// `max |c(k) - conj(c(-k))|`; zero for real-valued fields.
    pub fn hermitian_defect(&self) -> T {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut worst = T::zero();
        for i in 0..nx {
            for j in 0..ny {
                let a = self.coeffs[i * ny + j];
                let b = self.coeffs[((nx - i) % nx) * ny + (ny - j) % ny].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }

    /// Spatial mean (the zero mode).
    pub fn mean(&self) -> T {
        self.coeffs[0].re
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_coeffs(other, |a, b| a + b))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.zip_coeffs(other, |a, b| a - b))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: T, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        self.coeffs.par_iter_mut().zip(other.coeffs.par_iter()).for_each(|(a, &b)| *a = *a + b * s);
        Ok(())
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, Complex<T>) -> Complex<T> + Sync) -> Self {
        let coeffs = self.coeffs.par_iter().enumerate().map(|(m, &c)| f(m, c)).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    fn zip_coeffs(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T> + Sync) -> Self {
        let coeffs = self.coeffs.par_iter().zip(other.coeffs.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Multiply mode-wise by a real multiplier table.
    pub fn apply_multiplier(&self, weights: &[T]) -> Self {
        self.map_coeffs(|m, c| c * weights[m])
    }

    /// Spectral partial derivative along `axis` (0 = x, 1 = y).
    pub fn derivative(&self, axis: usize) -> Self {
        let g = self.grid.clone();
        self.map_coeffs(move |m, c| c * Complex::new(T::zero(), g.kd(axis, m)))
    }

    pub fn laplacian(&self) -> Self {
        let k2 = &self.grid.k2;
        self.map_coeffs(|m, c| -(c * k2[m]))
    }

    /// Dealiased pseudo-spectral product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let prod: Vec<T> = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| x * y).collect();
        Ok(Self::from_physical_dealiased(&self.grid, &prod))
    }

    pub(crate) fn from_physical_dealiased(grid: &Arc<Grid2D<T>>, values: &[T]) -> Self {
        let mut out = Self { grid: grid.clone(), coeffs: grid.fft.forward_real(values) };
        out.dealias();
        out
    }

    /// `(2pi)^2 sum |c_k|^2`, i.e. the squared L2 norm by Parseval.
    pub fn l2_norm_sq(&self) -> T {
        let c = &self.coeffs;
        det_sum(c.len(), |m| c[m].norm_sqr()) * self.grid.area()
    }

    pub fn max_abs_coeff(&self) -> T {
        let c = &self.coeffs;
        det_max(c.len(), |m| c[m].norm()).max(T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }
}

/// Pointwise values on the collocation grid (results of nonlinear pointwise maps).
#[derive(Clone, Debug)]
pub struct Collocation2D<T: Scalar> {
    grid: Arc<Grid2D<T>>,
    values: Vec<T>,
}

impl<T: Scalar> Collocation2D<T> {
    pub fn new(grid: &Arc<Grid2D<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Arc<Grid2D<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lebesgue_norm(&self, p: f64) -> T {
        crate::lp::norms::lebesgue_norm_values(&self.values, self.grid.cell_area(), p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::grid::GridSpec2D;

    fn grid(n: usize) -> Arc<Grid2D<f64>> {
        Grid2D::new(GridSpec2D::new(n, n).unwrap()).unwrap()
    }

    #[test]
    fn physical_round_trip() {
        let g = grid(32);
        let vals: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.5).collect();
        let u = SpectralField2D::from_physical(&g, &vals).unwrap();
        let back = u.to_physical();
        let err = vals.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
        assert!(u.hermitian_defect() < 1e-15);
    }

    #[test]
    fn derivative_of_trig() {
        let g = grid(16);
        let u = SpectralField2D::from_fn(&g, |x, y| (2.0 * x).sin() * y.cos());
        let du = u.derivative(0);
        let expect = SpectralField2D::from_fn(&g, |x, y| 2.0 * (2.0 * x).cos() * y.cos());
        assert!(du.minus(&expect).unwrap().max_abs_coeff() < 1e-14);
        let lap = u.laplacian();
        assert!(lap.plus(&u.scaled(5.0)).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn product_is_dealiased() {
        let g = grid(16);
        let (c, _) = g.spec().cutoffs();
        let kc = c as f64;
        let u = SpectralField2D::from_fn(&g, |x, _| (kc * x).cos());
        let p = u.product(&u).unwrap();
        assert!(p.is_dealiased());
        // cos^2 = (1 + cos 2kx)/2 and 2kc lies outside the band
        assert!((p.mean() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = SpectralField2D::zeros(&grid(16));
        let b = SpectralField2D::zeros(&grid(32));
        assert!(matches!(a.plus(&b), Err(Error::GridMismatch)));
    }
}
