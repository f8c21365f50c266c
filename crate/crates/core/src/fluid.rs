//! Incompressible Navier-Stokes forced by a kinetic stress: Leray projection,
//! right-hand side, IMEX stepping and the energy balance.

use std::sync::Arc;

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::lp::{Grid2D, SpectralField2D};
use crate::scalar::{det_max, det_sum, Scalar};

/// Two-component periodic velocity.
#[derive(Clone, Debug)]
pub struct VelocityField<T: Scalar> {
    pub u: [SpectralField2D<T>; 2],
}

impl<T: Scalar> VelocityField<T> {
    pub fn new(u1: SpectralField2D<T>, u2: SpectralField2D<T>) -> Result<Self> {
        u1.check_same_grid(&u2)?;
        Ok(Self { u: [u1, u2] })
    }

    pub fn zeros(grid: &Arc<Grid2D<T>>) -> Self {
        Self { u: [SpectralField2D::zeros(grid), SpectralField2D::zeros(grid)] }
    }

    pub fn from_fns(grid: &Arc<Grid2D<T>>, f1: impl Fn(T, T) -> T, f2: impl Fn(T, T) -> T) -> Self {
        Self { u: [SpectralField2D::from_fn(grid, f1), SpectralField2D::from_fn(grid, f2)] }
    }

    /// `(sin x cos y, -cos x sin y)` scaled by `amp`.
    pub fn taylor_green(grid: &Arc<Grid2D<T>>, amp: T) -> Self {
        Self::from_fns(grid, |x, y| amp * x.sin() * y.cos(), |x, y| -amp * x.cos() * y.sin())
    }

    /// Divergence-free field from a stream function: `u = (d_y psi, -d_x psi)`.
    pub fn from_stream(psi: &SpectralField2D<T>) -> Self {
        Self { u: [psi.derivative(1), psi.derivative(0).scaled(-T::one())] }
    }

    pub fn grid(&self) -> &Arc<Grid2D<T>> {
        self.u[0].grid()
    }

    pub fn physical(&self) -> [Vec<T>; 2] {
        [self.u[0].to_physical(), self.u[1].to_physical()]
    }

    /// `grad[i][j] = d_j u_i`.
    pub fn gradient(&self) -> [[SpectralField2D<T>; 2]; 2] {
        [[self.u[0].derivative(0), self.u[0].derivative(1)], [self.u[1].derivative(0), self.u[1].derivative(1)]]
    }

    pub fn divergence(&self) -> SpectralField2D<T> {
        self.u[0].derivative(0).plus(&self.u[1].derivative(1)).expect("same grid")
    }

    /// `max_k |k . u_hat(k)|`
    pub fn max_divergence_coeff(&self) -> T {
        self.divergence().max_abs_coeff()
    }

    pub fn max_speed(&self) -> T {
        let [a, b] = self.physical();
        det_max(a.len(), |m| (a[m] * a[m] + b[m] * b[m]).sqrt()).max(T::zero())
    }

    pub fn map(&self, f: impl Fn(&SpectralField2D<T>) -> SpectralField2D<T>) -> Self {
        Self { u: [f(&self.u[0]), f(&self.u[1])] }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|c| c.scaled(s))
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        Ok(Self { u: [self.u[0].plus(&other.u[0])?, self.u[1].plus(&other.u[1])?] })
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        Ok(Self { u: [self.u[0].minus(&other.u[0])?, self.u[1].minus(&other.u[1])?] })
    }

    /// `||u||_2^2` summed over components.
    pub fn l2_norm_sq(&self) -> T {
        self.u[0].l2_norm_sq() + self.u[1].l2_norm_sq()
    }

    pub fn max_abs_coeff(&self) -> T {
        self.u[0].max_abs_coeff().max(self.u[1].max_abs_coeff())
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().all(|c| c.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

/// Symmetric 2x2 stress field.
#[derive(Clone, Debug)]
pub struct StressField<T: Scalar> {
    pub t11: SpectralField2D<T>,
    pub t12: SpectralField2D<T>,
    pub t22: SpectralField2D<T>,
}

impl<T: Scalar> StressField<T> {
    pub fn new(t11: SpectralField2D<T>, t12: SpectralField2D<T>, t22: SpectralField2D<T>) -> Self {
        Self { t11, t12, t22 }
    }

    pub fn zeros(grid: &Arc<Grid2D<T>>) -> Self {
        let z = SpectralField2D::zeros(grid);
        Self { t11: z.clone(), t12: z.clone(), t22: z }
    }

    pub fn component(&self, i: usize, j: usize) -> &SpectralField2D<T> {
        match (i, j) {
            (0, 0) => &self.t11,
            (1, 1) => &self.t22,
            _ => &self.t12,
        }
    }

    /// `(div tau)_i = sum_j d_j tau_ij`
    pub fn divergence(&self) -> [SpectralField2D<T>; 2] {
        [
            self.t11.derivative(0).plus(&self.t12.derivative(1)).expect("same grid"),
            self.t12.derivative(0).plus(&self.t22.derivative(1)).expect("same grid"),
        ]
    }

    pub fn max_abs_coeff(&self) -> T {
        self.t11.max_abs_coeff().max(self.t12.max_abs_coeff()).max(self.t22.max_abs_coeff())
    }
}

/// Helmholtz-Leray projection onto divergence-free fields. The mean flow passes through.
pub fn leray_project<T: Scalar>(w: &[SpectralField2D<T>; 2]) -> Result<VelocityField<T>> {
    w[0].check_same_grid(&w[1])?;
    let g = w[0].grid().clone();
    let (a, b) = (w[0].coeffs(), w[1].coeffs());
    let proj = |comp: usize| {
        w[comp].map_coeffs(|m, c| {
            let (k1, k2) = (g.kd(0, m), g.kd(1, m));
            let kk = k1 * k1 + k2 * k2;
            if kk == T::zero() {
                return c;
            }
            let dot = a[m] * k1 + b[m] * k2;
            let kc = if comp == 0 { k1 } else { k2 };
            c - dot * (kc / kk)
        })
    };
    Ok(VelocityField { u: [proj(0), proj(1)] })
}

/// Dealiased `(u . grad) u`.
pub fn advection<T: Scalar>(v: &VelocityField<T>) -> [SpectralField2D<T>; 2] {
    let g = v.gradient();
    let phys = v.physical();
    let grid = v.grid();
    let comp = |i: usize| {
        let d1 = g[i][0].to_physical();
        let d2 = g[i][1].to_physical();
        let vals: Vec<T> = (0..phys[0].len()).map(|m| phys[0][m] * d1[m] + phys[1][m] * d2[m]).collect();
        SpectralField2D::from_physical_dealiased(grid, &vals)
    };
    [comp(0), comp(1)]
}

/// Projected explicit forcing `P(-(u.grad)u + div tau)`.
pub fn explicit_rhs<T: Scalar>(v: &VelocityField<T>, tau: &StressField<T>) -> Result<VelocityField<T>> {
    let adv = advection(v);
    let div = tau.divergence();
    let w = [div[0].minus(&adv[0])?, div[1].minus(&adv[1])?];
    leray_project(&w)
}

/// `P(-(u.grad)u + div tau) + nu Delta u`.
pub fn nse_rhs<T: Scalar>(v: &VelocityField<T>, tau: &StressField<T>, nu: T) -> Result<VelocityField<T>> {
    let e = explicit_rhs(v, tau)?;
    Ok(VelocityField { u: [e.u[0].plus(&v.u[0].laplacian().scaled(nu))?, e.u[1].plus(&v.u[1].laplacian().scaled(nu))?] })
}

/// Exact viscous propagator `exp(-nu |k|^2 dt)` as a multiplier table.
pub fn viscous_factor<T: Scalar>(grid: &Grid2D<T>, nu: T, dt: T) -> Vec<T> {
    grid.k_squared().iter().map(|&k2| (-nu * k2 * dt).exp()).collect()
}

/// Largest step allowed by the advective CFL bound `dt |u|_inf <= C dx`.
pub fn max_stable_dt<T: Scalar>(v: &VelocityField<T>, safety: T) -> T {
    let s = v.max_speed();
    if s > T::zero() {
        safety * v.grid().spacing() / s
    } else {
        T::infinity()
    }
}

/// One integrating-factor Heun step of the forced Navier-Stokes system with frozen stress.
pub fn step_fluid<T: Scalar>(v: &VelocityField<T>, tau: &StressField<T>, nu: T, dt: T, cfl: T) -> Result<VelocityField<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if nu < T::zero() {
        return Err(Error::Domain(format!("viscosity must be non-negative, got {nu}")));
    }
    let limit = max_stable_dt(v, cfl);
    if dt > limit {
        return Err(Error::Cfl(format!("fluid step dt = {dt} exceeds limit {limit}")));
    }
    let e = viscous_factor(v.grid(), nu, dt);
    let n0 = explicit_rhs(v, tau)?;
    let pred = v.plus(&n0.scaled(dt))?.map(|c| c.apply_multiplier(&e));
    let n1 = explicit_rhs(&pred, tau)?;
    Ok(heun_combine(v, &n0, &n1, &e, dt))
}

pub(crate) fn heun_combine<T: Scalar>(v: &VelocityField<T>, n0: &VelocityField<T>, n1: &VelocityField<T>, e: &[T], dt: T) -> VelocityField<T> {
    let h = dt * T::of(0.5);
    let comp = |i: usize| v.u[i].map_coeffs(|m, c| (c + n0.u[i].coeffs()[m] * h) * e[m] + n1.u[i].coeffs()[m] * h);
    VelocityField { u: [comp(0), comp(1)] }
}

/// Terms of `dE/dt = -D + S` for `E = |u|_2^2 / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBudget<T> {
    pub energy: T,
    /// `nu |grad u|_2^2`
    pub dissipation: T,
    /// `<u, div tau>`
    pub stress_power: T,
}

fn inner<T: Scalar>(a: &SpectralField2D<T>, b: &SpectralField2D<T>) -> T {
    let (x, y) = (a.coeffs(), b.coeffs());
    det_sum(x.len(), |m| (x[m] * y[m].conj()).re) * a.grid().area()
}

pub fn energy_budget<T: Scalar>(v: &VelocityField<T>, tau: &StressField<T>, nu: T) -> EnergyBudget<T> {
    let g = v.grid();
    let k2 = g.k_squared();
    let grad_sq = v.u.iter().map(|c| {
        let z = c.coeffs();
        det_sum(z.len(), |m| z[m].norm_sqr() * k2[m])
    });
    let dissipation = nu * grad_sq.fold(T::zero(), |a, b| a + b) * g.area();
    let div = tau.divergence();
    EnergyBudget { energy: v.l2_norm_sq() * T::of(0.5), dissipation, stress_power: inner(&v.u[0], &div[0]) + inner(&v.u[1], &div[1]) }
}

/// Mean-free pressure solving `-Delta p = div((u.grad)u - div tau)`.
pub fn pressure<T: Scalar>(v: &VelocityField<T>, tau: &StressField<T>) -> SpectralField2D<T> {
    let adv = advection(v);
    let div = tau.divergence();
    let g = v.grid().clone();
    let (a0, a1, d0, d1) = (adv[0].coeffs(), adv[1].coeffs(), div[0].coeffs(), div[1].coeffs());
    let k2 = g.k_squared();
    adv[0].map_coeffs(|m, _| {
        if k2[m] == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let (k1, k2m) = (g.kd(0, m), g.kd(1, m));
        let w0 = d0[m] - a0[m];
        let w1 = d1[m] - a1[m];
        // i k . w = -Delta p  =>  p = i k.w / |k|^2 with the sign of grad p = w - P w
        (w0 * k1 + w1 * k2m) * Complex::new(T::zero(), -T::one()) / k2[m]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::GridSpec2D;

    fn grid(n: usize) -> Arc<Grid2D<f64>> {
        Grid2D::new(GridSpec2D::new(n, n).unwrap()).unwrap()
    }

    #[test]
    fn projection_removes_gradient() {
        let g = grid(16);
        let phi = SpectralField2D::from_fn(&g, |x, y| (x + 2.0 * y).sin());
        let psi = SpectralField2D::from_fn(&g, |x, y| x.cos() * (3.0 * y).cos());
        let sol = VelocityField::from_stream(&psi);
        let w = [sol.u[0].plus(&phi.derivative(0)).unwrap(), sol.u[1].plus(&phi.derivative(1)).unwrap()];
        let p = leray_project(&w).unwrap();
        assert!(p.minus(&sol).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn taylor_green_decays_exactly() {
        let g = grid(32);
        let v = VelocityField::taylor_green(&g, 1.0);
        let tau = StressField::zeros(&g);
        let (nu, dt) = (0.1, 0.01);
        let mut w = v.clone();
        for _ in 0..10 {
            w = step_fluid(&w, &tau, nu, dt, 0.5).unwrap();
        }
        let exact = v.scaled((-2.0 * nu * 0.1f64).exp());
        assert!(w.minus(&exact).unwrap().max_abs_coeff() < 1e-13);
    }

    #[test]
    fn pressure_of_taylor_green() {
        let g = grid(32);
        let v = VelocityField::taylor_green(&g, 1.0);
        let p = pressure(&v, &StressField::zeros(&g));
        let exact = SpectralField2D::from_fn(&g, |x, y| ((2.0 * x).cos() + (2.0 * y).cos()) / 4.0);
        assert!(p.minus(&exact).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn budget_of_taylor_green() {
        let g = grid(32);
        let v = VelocityField::taylor_green(&g, 1.0);
        let b = energy_budget(&v, &StressField::zeros(&g), 0.1);
        let e = std::f64::consts::PI.powi(2);
        assert!((b.energy - e).abs() < 1e-12);
        assert!((b.dissipation - 4.0 * 0.1 * e).abs() < 1e-12);
        assert_eq!(b.stress_power, 0.0);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let g = grid(16);
        let v = VelocityField::taylor_green(&g, 10.0);
        let r = step_fluid(&v, &StressField::zeros(&g), 0.1, 1.0, 0.5);
        assert!(matches!(r, Err(Error::Cfl(_))));
    }
}
