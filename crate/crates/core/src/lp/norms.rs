use crate::error::{Error, Result};
use crate::lp::blocks::delta_q;
use crate::lp::field::SpectralField2D;
use crate::lp::ladder::LOW_BLOCK;
use crate::scalar::{det_max, det_sum, Scalar};

/// Collocation quadrature of `(int |u|^p)^(1/p)`; `p = inf` gives the grid maximum.
pub fn lebesgue_norm_values<T: Scalar>(values: &[T], cell_area: T, p: f64) -> T {
    if values.is_empty() {
        return T::zero();
    }
    if p.is_infinite() {
        return det_max(values.len(), |i| values[i].abs());
    }
    let pe = T::of(p);
    let s = det_sum(values.len(), |i| values[i].abs().powf(pe));
    (s * cell_area).powf(T::one() / pe)
}

/// `||u||_{L^p}` over the box `[0, 2pi)^2`.
pub fn lebesgue_norm<T: Scalar>(u: &SpectralField2D<T>, p: f64) -> T {
    if u.is_zero() {
        return T::zero();
    }
    lebesgue_norm_values(&u.to_physical(), u.grid().cell_area(), p)
}

/// Which blocks enter a Besov sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesovKind {
    /// Blocks `q_min..=q_max` only.
    Homogeneous,
    /// Homogeneous sum plus `||S_0 u||_{L^p}`.
    Inhomogeneous,
}

/// `|| (2^{qs} ||Delta_q u||_{L^p})_q ||_{l^r}` over the grid-resolvable levels.
pub fn besov_seminorm<T: Scalar>(u: &SpectralField2D<T>, s: f64, p: f64, r: f64) -> T {
    besov_norm(u, s, p, r, BesovKind::Homogeneous)
}

pub fn besov_norm<T: Scalar>(u: &SpectralField2D<T>, s: f64, p: f64, r: f64, kind: BesovKind) -> T {
    let ladder = u.grid().ladder();
    let terms: Vec<T> = (ladder.q_min()..=ladder.q_max())
        .map(|q| T::of(2f64.powf(q as f64 * s)) * lebesgue_norm(&delta_q(u, q), p))
        .collect();
    let seq = if r.is_infinite() {
        terms.iter().fold(T::zero(), |a, &b| a.max(b))
    } else {
        let re = T::of(r);
        terms.iter().fold(T::zero(), |a, &b| a + b.powf(re)).powf(T::one() / re)
    };
    match kind {
        BesovKind::Homogeneous => seq,
        BesovKind::Inhomogeneous => seq + lebesgue_norm(&delta_q(u, LOW_BLOCK), p),
    }
}

/// `exp(nu t Delta) u`, the exact heat multiplier `exp(-nu t |k|^2)`.
pub fn heat_propagate<T: Scalar>(u: &SpectralField2D<T>, t: T, nu: T) -> Result<SpectralField2D<T>> {
    if t < T::zero() || !t.is_finite() {
        return Err(Error::Domain(format!("heat_propagate needs t >= 0, got {t}")));
    }
    if nu < T::zero() {
        return Err(Error::Domain(format!("viscosity must be nonnegative, got {nu}")));
    }
    let k2 = u.grid().k_squared();
    Ok(u.map_coeffs(|m, c| c * (-(nu * t * k2[m])).exp()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::lp::grid::{Grid2D, GridSpec2D};

    #[test]
    fn cosine_norms() {
        let g = Grid2D::<f64>::new(GridSpec2D::new(32, 32).unwrap()).unwrap();
        let u = SpectralField2D::from_fn(&g, |x, _| x.cos());
        assert!((lebesgue_norm(&u, 2.0) - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
        assert!((lebesgue_norm(&u, f64::INFINITY) - 1.0).abs() < 1e-14);
        // the kink of |cos| limits the collocation rule to O(h^2)
        assert!((lebesgue_norm(&u, 1.0) - 8.0 * PI).abs() < 0.1);
        assert_eq!(lebesgue_norm(&SpectralField2D::zeros(&g), 3.0), 0.0);
    }

    #[test]
    fn heat_rejects_negative_time() {
        let g = Grid2D::<f64>::new(GridSpec2D::new(16, 16).unwrap()).unwrap();
        let u = SpectralField2D::from_fn(&g, |x, _| x.cos());
        assert!(heat_propagate(&u, -1.0, 0.1).is_err());
        let same = heat_propagate(&u, 0.0, 0.1).unwrap();
        assert!(same.minus(&u).unwrap().is_zero());
    }
}
