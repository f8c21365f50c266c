//! Calculus on the orientation circle `M = S^1` with the flat metric.
//!
//! On the circle the gradient and divergence both reduce to `d/dtheta`, the
//! Laplace-Beltrami operator is the multiplier `-k^2`, and the smoothing
//! operator `H = (I - Delta_g)^{-s/2}` is the multiplier `(1 + k^2)^{-s/2}`.
//! All of them are exposed both on single-site [`FiberField`]s and as weight
//! tables so that phase-space fields can apply them along the angle axis.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::lp::grid::{cutoff, wavenumber};
use crate::scalar::{det_sum, Scalar};

/// Uniform angle grid on `[0, 2pi)`.
pub struct FiberGrid<T: Scalar> {
    nm: usize,
    pub(crate) fft: Fft3<T>,
    k: Vec<T>,
    kd: Vec<T>,
    keep: Vec<bool>,
}

impl<T: Scalar> std::fmt::Debug for FiberGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberGrid").field("nm", &self.nm).finish()
    }
}

impl<T: Scalar> FiberGrid<T> {
    pub fn new(nm: usize, dealias_fraction: f64) -> Result<Arc<Self>> {
        if nm < 8 || !nm.is_power_of_two() {
            return Err(Error::Grid(format!("nm = {nm} must be a power of two >= 8")));
        }
        let c = cutoff(nm, dealias_fraction);
        let k: Vec<T> = (0..nm).map(|j| T::of(wavenumber(j, nm) as f64)).collect();
        let kd = (0..nm).map(|j| if 2 * j == nm { T::zero() } else { k[j] }).collect();
        let keep = (0..nm).map(|j| wavenumber(j, nm).unsigned_abs() as usize <= c).collect();
        Ok(Arc::new(Self { nm, fft: Fft3::new([nm, 1, 1]), k, kd, keep }))
    }

    pub fn nm(&self) -> usize {
        self.nm
    }

    pub fn theta(&self, j: usize) -> T {
        T::of(2.0 * PI * j as f64 / self.nm as f64)
    }

    pub fn spacing(&self) -> T {
        T::of(2.0 * PI / self.nm as f64)
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.k
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    /// Largest retained `|k|` after dealiasing.
    pub fn cutoff(&self) -> usize {
        self.keep.iter().enumerate().filter(|(_, &k)| k).map(|(j, _)| wavenumber(j, self.nm).unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn laplace_weights(&self) -> Vec<T> {
        self.k.iter().map(|&k| -(k * k)).collect()
    }

    /// `i k`: the multiplier of both `grad_g` and `div_g` on the circle.
    pub fn derivative_weights(&self) -> Vec<Complex<T>> {
        self.kd.iter().map(|&k| Complex::new(T::zero(), k)).collect()
    }

    pub fn smoothing_weights(&self, s: T) -> Result<Vec<T>> {
        if !(s > T::zero()) {
            return Err(Error::Domain(format!("smoothing order s must be positive, got {s}")));
        }
        let e = -s / T::of(2.0);
        Ok(self.k.iter().map(|&k| (T::one() + k * k).powf(e)).collect())
    }

    /// Multiplier of `f -> int K(theta - theta') f(theta') dtheta'`.
    pub fn kernel_weights(&self, kernel: &KernelSpec<T>) -> Vec<T> {
        self.k.iter().map(|&k| T::of(2.0 * PI) * kernel.fourier_coefficient(k.abs().to_usize().unwrap_or(0))).collect()
    }
}

/// Symmetric convolution kernel `K(theta, theta') = b * sum_n a_n cos(n (theta - theta'))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T: Scalar> {
    pub intensity: T,
    pub cos_coeffs: Vec<T>,
}

impl<T: Scalar> KernelSpec<T> {
    /// Maier-Saupe alignment kernel `-b cos(2(theta - theta'))`.
    pub fn maier_saupe(b: T) -> Self {
        Self { intensity: b, cos_coeffs: vec![T::zero(), T::zero(), -T::one()] }
    }

    pub fn none() -> Self {
        Self { intensity: T::zero(), cos_coeffs: Vec::new() }
    }

    pub fn by_name(name: &str, b: T) -> Result<Self> {
        match name {
            "maier-saupe" => Ok(Self::maier_saupe(b)),
            "none" => Ok(Self::none()),
            other => Err(Error::Config(vec![format!("kernel: unknown kernel '{other}' (expected maier-saupe or none)")])),
        }
    }

    /// Highest angular wavenumber carried by the kernel.
    pub fn cutoff(&self) -> usize {
        self.cos_coeffs.len().saturating_sub(1)
    }

    /// Complex Fourier coefficient `K_hat(n)` of the profile (real and even in `n`).
    pub fn fourier_coefficient(&self, n: usize) -> T {
        match self.cos_coeffs.get(n) {
            None => T::zero(),
            Some(&a) if n == 0 => self.intensity * a,
            Some(&a) => self.intensity * a / T::of(2.0),
        }
    }

    /// `K(delta)` evaluated directly.
    pub fn eval(&self, delta: T) -> T {
        self.cos_coeffs.iter().enumerate().fold(T::zero(), |acc, (n, &a)| acc + a * (T::of_usize(n) * delta).cos()) * self.intensity
    }
}

/// Function of the angle at one spatial site, held as Fourier amplitudes.
#[derive(Clone, Debug)]
pub struct FiberField<T: Scalar> {
    fiber: Arc<FiberGrid<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> FiberField<T> {
    pub fn from_values(fiber: &Arc<FiberGrid<T>>, values: &[T]) -> Result<Self> {
        if values.len() != fiber.nm {
            return Err(Error::Grid(format!("expected {} angle samples, got {}", fiber.nm, values.len())));
        }
        Ok(Self { fiber: fiber.clone(), coeffs: fiber.fft.forward_real(values) })
    }

    pub fn from_fn(fiber: &Arc<FiberGrid<T>>, f: impl Fn(T) -> T) -> Self {
        let values: Vec<T> = (0..fiber.nm).map(|j| f(fiber.theta(j))).collect();
        Self { fiber: fiber.clone(), coeffs: fiber.fft.forward_real(&values) }
    }

    pub fn constant(fiber: &Arc<FiberGrid<T>>, c: T) -> Self {
        Self::from_fn(fiber, |_| c)
    }

    pub fn fiber(&self) -> &Arc<FiberGrid<T>> {
        &self.fiber
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn values(&self) -> Vec<T> {
        self.fiber.fft.inverse_real(&self.coeffs)
    }

    fn map(&self, f: impl Fn(usize, Complex<T>) -> Complex<T>) -> Self {
        Self { fiber: self.fiber.clone(), coeffs: self.coeffs.iter().enumerate().map(|(j, &c)| f(j, c)).collect() }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.map(|j, c| c - other.coeffs[j])
    }

    /// `Delta_g f`
    pub fn laplace_beltrami(&self) -> Self {
        let w = self.fiber.laplace_weights();
        self.map(|j, c| c * w[j])
    }

    /// `grad_g f = df/dtheta`
    pub fn grad_g(&self) -> Self {
        let w = self.fiber.derivative_weights();
        self.map(|j, c| c * w[j])
    }

    /// `div_g F = dF/dtheta` for a tangent field given by its single component.
    pub fn div_g(&self) -> Self {
        self.grad_g()
    }

    /// `H f = (I - Delta_g)^{-s/2} f`
    pub fn smoothing_h(&self, s: T) -> Result<Self> {
        let w = self.fiber.smoothing_weights(s)?;
        Ok(self.map(|j, c| c * w[j]))
    }

    /// `U(theta) = int K(theta, theta') f(theta') dtheta'`
    pub fn potential_u(&self, kernel: &KernelSpec<T>) -> Self {
        let w = self.fiber.kernel_weights(kernel);
        self.map(|j, c| c * w[j])
    }

    /// `int_M f dtheta`
    pub fn integral(&self) -> T {
        self.coeffs[0].re * T::of(2.0 * PI)
    }

    /// `||f||_{L^2(M)}` by Parseval.
    pub fn l2_norm(&self) -> T {
        let c = &self.coeffs;
        (det_sum(c.len(), |j| c[j].norm_sqr()) * T::of(2.0 * PI)).sqrt()
    }

    /// `||H f||_{L^2(M)}`, the dual-Sobolev size of the site distribution.
    pub fn hs_dual_norm(&self, s: T) -> Result<T> {
        Ok(self.smoothing_h(s)?.l2_norm())
    }

    /// `int_M f g dtheta`
    pub fn inner(&self, other: &Self) -> T {
        let s = self.coeffs.iter().zip(&other.coeffs).fold(T::zero(), |acc, (a, b)| acc + (a * b.conj()).re);
        s * T::of(2.0 * PI)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a.max(c.norm()))
    }
}

/// Free-function forms of the fiber operators.
pub fn laplace_beltrami<T: Scalar>(f: &FiberField<T>) -> FiberField<T> {
    f.laplace_beltrami()
}

pub fn smoothing_h<T: Scalar>(f: &FiberField<T>, s: T) -> Result<FiberField<T>> {
    f.smoothing_h(s)
}

pub fn potential_u<T: Scalar>(f: &FiberField<T>, kernel: &KernelSpec<T>) -> FiberField<T> {
    f.potential_u(kernel)
}

pub fn fiber_hs_dual_norm<T: Scalar>(f: &FiberField<T>, s: T) -> Result<T> {
    f.hs_dual_norm(s)
}
