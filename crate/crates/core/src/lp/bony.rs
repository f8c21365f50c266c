//! Paraproduct decomposition `uv = T_u v + T_v u + R(u, v)`.

use std::sync::Arc;

use crate::error::Result;
use crate::lp::blocks::{paraproduct_phys, remainder_phys, BlockStack};
use crate::lp::field::SpectralField2D;
use crate::lp::grid::Grid2D;
use crate::scalar::Scalar;

pub(crate) fn stack2d<T: Scalar>(u: &SpectralField2D<T>) -> BlockStack<T> {
    let g = u.grid().clone();
    let inv = move |c: Vec<_>| g.fft.inverse_real(&c);
    BlockStack::build(u.coeffs(), u.grid().ladder(), &inv)
}

fn finish<T: Scalar>(grid: &Arc<Grid2D<T>>, values: Vec<T>) -> SpectralField2D<T> {
    SpectralField2D::from_physical_dealiased(grid, &values)
}

/// `T_u v = sum_q S_{q-1}u Delta_q v`, dealiased.
pub fn paraproduct<T: Scalar>(u: &SpectralField2D<T>, v: &SpectralField2D<T>) -> Result<SpectralField2D<T>> {
    u.check_same_grid(v)?;
    Ok(finish(u.grid(), paraproduct_phys(&stack2d(u), &stack2d(v))))
}

/// `R(u, v) = sum_{|q - q'| <= 1} Delta_q' u Delta_q v`, dealiased.
pub fn remainder<T: Scalar>(u: &SpectralField2D<T>, v: &SpectralField2D<T>) -> Result<SpectralField2D<T>> {
    u.check_same_grid(v)?;
    Ok(finish(u.grid(), remainder_phys(&stack2d(u), &stack2d(v))))
}

/// The three Bony pieces together with the dealiased product they should sum to.
pub struct BonySplit<T: Scalar> {
    pub low_high: SpectralField2D<T>,
    pub high_low: SpectralField2D<T>,
    pub remainder: SpectralField2D<T>,
    pub product: SpectralField2D<T>,
}

impl<T: Scalar> BonySplit<T> {
    pub fn compute(u: &SpectralField2D<T>, v: &SpectralField2D<T>) -> Result<Self> {
        u.check_same_grid(v)?;
        let (su, sv) = (stack2d(u), stack2d(v));
        let g = u.grid();
        Ok(Self {
            low_high: finish(g, paraproduct_phys(&su, &sv)),
            high_low: finish(g, paraproduct_phys(&sv, &su)),
            remainder: finish(g, remainder_phys(&su, &sv)),
            product: u.product(v)?,
        })
    }

    /// `||uv - T_u v - T_v u - R(u,v)||_L2`.
    pub fn residual_l2(&self) -> T {
        let r = self
            .product
            .minus(&self.low_high)
            .and_then(|r| r.minus(&self.high_low))
            .and_then(|r| r.minus(&self.remainder))
            .expect("same grid");
        r.l2_norm_sq().sqrt()
    }
}
