//! Smooth dyadic partition of unity on the wavenumber lattice.
//!
//! `chi` is a radial bump equal to one on `|xi| <= 1/2` and vanishing for
//! `|xi| >= 1`; the ring profile is `phi(xi) = chi(xi/2) - chi(xi)`. Block
//! `q >= 0` carries the weight `phi(2^-q xi)`, and block `-1` is the low block
//! `chi(xi)` (the `S_0` projector). `S_q` is `chi(2^-q xi)` for `q >= 0` and
//! zero for `q < 0`, so `S_q = sum_{q' <= q-1} Delta_q'` including block `-1`.

use crate::error::{Error, Result};
use crate::lp::grid::{wavenumber, GridSpec2D};
use crate::scalar::Scalar;

/// Index of the low-frequency block.
pub const LOW_BLOCK: i32 = -1;

/// `chi(r)`: one on `[0, 1/2]`, zero on `[1, inf)`, a `C^inf` blend of
/// `exp(-1/t)` weights in between.
pub fn chi_profile<T: Scalar>(r: T) -> T {
    let half = T::of(0.5);
    if r <= half {
        return T::one();
    }
    if r >= T::one() {
        return T::zero();
    }
    let t = T::of(2.0) * r - T::one();
    let keep = (-T::one() / (T::one() - t)).exp();
    let drop = (-T::one() / t).exp();
    keep / (keep + drop)
}

/// Ring profile `phi(r) = chi(r/2) - chi(r)`, supported in `1/2 < r < 2`.
pub fn phi_profile<T: Scalar>(r: T) -> T {
    chi_profile(r * T::of(0.5)) - chi_profile(r)
}

/// Block and low-pass multipliers sampled on a grid's wavenumber lattice.
#[derive(Clone, Debug)]
pub struct DyadicLadder<T: Scalar> {
    q_min: i32,
    q_max: i32,
    radius: Vec<T>,
    /// `chi(|k|)`: the low block.
    chi: Vec<T>,
    /// `phi(2^-q |k|)` for `q = 0..=q_max`.
    phi: Vec<Vec<T>>,
    /// `chi(2^-q |k|)` for `q = 0..=q_max + 1`.
    low_pass: Vec<Vec<T>>,
}

impl<T: Scalar> DyadicLadder<T> {
    /// Sample the partition on the lattice of `spec`.
    ///
    /// `q_max` is the smallest level with `2^q_max >= max |k|`, which makes
    /// `chi(2^-(q_max+1) xi) = 1` on every resolvable wavenumber.
    pub fn build(spec: &GridSpec2D) -> Result<Self> {
        let (nx, ny) = (spec.nx, spec.ny);
        let mut radius = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let kx = wavenumber(i, nx) as f64;
            for j in 0..ny {
                let ky = wavenumber(j, ny) as f64;
                radius.push(T::of((kx * kx + ky * ky).sqrt()));
            }
        }
        let kmax = radius.iter().fold(T::zero(), |a, &b| a.max(b)).to_f64_lossy();
        let q_max = kmax.log2().ceil() as i32;
        if q_max < 1 {
            return Err(Error::Grid(format!("grid {nx}x{ny} cannot host two dyadic rings")));
        }
        let scaled = |q: i32| -> T { T::of(2f64.powi(-q)) };
        let chi = radius.iter().map(|&r| chi_profile(r)).collect();
        let phi = (0..=q_max)
            .map(|q| {
                let s = scaled(q);
                radius.iter().map(|&r| phi_profile(r * s)).collect()
            })
            .collect();
        let low_pass = (0..=q_max + 1)
            .map(|q| {
                let s = scaled(q);
                radius.iter().map(|&r| chi_profile(r * s)).collect()
            })
            .collect();
        Ok(Self { q_min: 0, q_max, radius, chi, phi, low_pass })
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// All block indices including the low block: `-1..=q_max`.
    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        LOW_BLOCK..=self.q_max
    }

    pub fn block_count(&self) -> usize {
        (self.q_max - LOW_BLOCK + 1) as usize
    }

    pub fn contains(&self, q: i32) -> bool {
        (LOW_BLOCK..=self.q_max).contains(&q)
    }

    pub fn radius(&self) -> &[T] {
        &self.radius
    }

    pub fn chi_weights(&self) -> &[T] {
        &self.chi
    }

    /// Multiplier of `Delta_q`, or `None` when `q` lies outside the ladder.
    pub fn block_weights(&self, q: i32) -> Option<&[T]> {
        if q == LOW_BLOCK {
            Some(&self.chi)
        } else if (0..=self.q_max).contains(&q) {
            Some(&self.phi[q as usize])
        } else {
            None
        }
    }

    /// Multiplier of `S_q`; `None` means the zero operator (`q < 0`).
    /// Levels above `q_max + 1` reuse the identity multiplier of `q_max + 1`.
    pub fn low_pass_weights(&self, q: i32) -> Option<&[T]> {
        if q < 0 {
            None
        } else {
            let idx = (q as usize).min(self.low_pass.len() - 1);
            Some(&self.low_pass[idx])
        }
    }

    /// `max |chi + sum_q phi_q - 1|` over the lattice.
    pub fn partition_residual(&self) -> T {
        let mut worst = T::zero();
        for m in 0..self.radius.len() {
            let mut s = self.chi[m];
            for w in &self.phi {
                s = s + w[m];
            }
            worst = worst.max((s - T::one()).abs());
        }
        worst
    }

    /// `max |w_p w_q|` over the lattice and all pairs with `|p - q| >= 2`.
    pub fn overlap_residual(&self) -> T {
        let mut worst = T::zero();
        for p in self.blocks() {
            for q in self.blocks() {
                if (p - q).abs() < 2 {
                    continue;
                }
                let (a, b) = (self.block_weights(p).unwrap(), self.block_weights(q).unwrap());
                for m in 0..a.len() {
                    worst = worst.max((a[m] * b[m]).abs());
                }
            }
        }
        worst
    }
}
