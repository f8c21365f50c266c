use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::lp::ladder::DyadicLadder;
use crate::scalar::Scalar;

/// Resolution of the periodic box `[0, 2pi)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec2D {
    pub nx: usize,
    pub ny: usize,
    /// Fraction of the half-spectrum retained after every product (2/3 rule by default).
    pub dealias_fraction: f64,
}

impl GridSpec2D {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        let spec = Self { nx, ny, dealias_fraction: Self::DEFAULT_DEALIAS };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dealias(mut self, fraction: f64) -> Result<Self> {
        self.dealias_fraction = fraction;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::Grid(format!("{name} = {n} must be a power of two >= 8")));
            }
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Grid(format!("dealias_fraction = {} must lie in (0, 1]", self.dealias_fraction)));
        }
        Ok(())
    }

    /// Largest retained `|k_x|` and `|k_y|` after dealiasing.
    pub fn cutoffs(&self) -> (usize, usize) {
        (cutoff(self.nx, self.dealias_fraction), cutoff(self.ny, self.dealias_fraction))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn cutoff(n: usize, fraction: f64) -> usize {
    ((fraction * (n / 2) as f64) + 1e-9).floor() as usize
}

/// Signed wavenumber of FFT index `j` on an `n`-point periodic axis (Nyquist mapped to `+n/2`).
pub(crate) fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Grid with cached transform plans, wavenumber tables, dealias mask and dyadic ladder.
pub struct Grid2D<T: Scalar> {
    spec: GridSpec2D,
    pub(crate) fft: Fft3<T>,
    /// Derivative wavenumbers: Nyquist entries are zero so odd derivatives stay real.
    pub(crate) kx_d: Vec<T>,
    pub(crate) ky_d: Vec<T>,
    pub(crate) k2: Vec<T>,
    pub(crate) keep: Vec<bool>,
    ladder: DyadicLadder<T>,
}

impl<T: Scalar> std::fmt::Debug for Grid2D<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid2D").field("spec", &self.spec).finish()
    }
}

impl<T: Scalar> Grid2D<T> {
    pub fn new(spec: GridSpec2D) -> Result<Arc<Self>> {
        spec.validate()?;
        let (nx, ny) = (spec.nx, spec.ny);
        let (cx, cy) = spec.cutoffs();
        let kx: Vec<T> = (0..nx).map(|j| T::of(wavenumber(j, nx) as f64)).collect();
        let ky: Vec<T> = (0..ny).map(|j| T::of(wavenumber(j, ny) as f64)).collect();
        let kx_d = (0..nx).map(|j| if 2 * j == nx { T::zero() } else { kx[j] }).collect();
        let ky_d = (0..ny).map(|j| if 2 * j == ny { T::zero() } else { ky[j] }).collect();
        let mut k2 = Vec::with_capacity(nx * ny);
        let mut keep = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                k2.push(kx[i] * kx[i] + ky[j] * ky[j]);
                keep.push(wavenumber(i, nx).unsigned_abs() as usize <= cx && wavenumber(j, ny).unsigned_abs() as usize <= cy);
            }
        }
        let ladder = DyadicLadder::build(&spec)?;
        Ok(Arc::new(Self { spec, fft: Fft3::new([nx, ny, 1]), kx_d, ky_d, k2, keep, ladder }))
    }

    pub fn spec(&self) -> &GridSpec2D {
        &self.spec
    }

    pub fn nx(&self) -> usize {
        self.spec.nx
    }

    pub fn ny(&self) -> usize {
        self.spec.ny
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ladder(&self) -> &DyadicLadder<T> {
        &self.ladder
    }

    /// Collocation coordinate along x for index `i`.
    pub fn x(&self, i: usize) -> T {
        T::of(2.0 * PI * i as f64 / self.spec.nx as f64)
    }

    pub fn y(&self, j: usize) -> T {
        T::of(2.0 * PI * j as f64 / self.spec.ny as f64)
    }

    /// Area element of the collocation quadrature.
    pub fn cell_area(&self) -> T {
        T::of(4.0 * PI * PI / self.len() as f64)
    }

    pub fn area(&self) -> T {
        T::of(4.0 * PI * PI)
    }

    pub fn spacing(&self) -> T {
        T::of(2.0 * PI / self.spec.nx.max(self.spec.ny) as f64)
    }

    /// Derivative wavenumber along `axis` (0 = x, 1 = y) for flat mode index `m`.
    #[inline]
    pub(crate) fn kd(&self, axis: usize, m: usize) -> T {
        let ny = self.spec.ny;
        if axis == 0 {
            self.kx_d[m / ny]
        } else {
            self.ky_d[m % ny]
        }
    }

    /// `|k|^2` table in flat mode order.
    pub fn k_squared(&self) -> &[T] {
        &self.k2
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    pub(crate) fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.spec == other.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec2D::new(100, 64).is_err());
        assert!(GridSpec2D::new(4, 4).is_err());
        assert!(GridSpec2D::new(64, 32).is_ok());
        assert!(GridSpec2D::new(64, 64).unwrap().with_dealias(0.0).is_err());
    }

    #[test]
    fn two_thirds_cutoff() {
        let spec = GridSpec2D::new(64, 32).unwrap();
        assert_eq!(spec.cutoffs(), (21, 10));
        let full = spec.with_dealias(1.0).unwrap();
        assert_eq!(full.cutoffs(), (32, 16));
    }

    #[test]
    fn wavenumber_layout() {
        let w: Vec<i64> = (0..8).map(|j| wavenumber(j, 8)).collect();
        assert_eq!(w, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }
}
