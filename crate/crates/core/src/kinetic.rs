//! Smoluchowski (Fokker-Planck) dynamics of the orientation density
//! `f(x, y, theta)`: drift assembly, right-hand side, IMEX stepping and the
//! kinetic stress fed back to the fluid.
//!
//! Phase-space arrays are laid out angle-major: flat index
//! `(j_theta * nx + i_x) * ny + i_y`, both for collocation values and for
//! Fourier coefficients.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::fiber::{FiberGrid, KernelSpec};
use crate::fluid::{StressField, VelocityField};
use crate::lp::{Grid2D, SpectralField2D};
use crate::scalar::{det_max, det_sum, Scalar};

/// Product of the spatial grid and the orientation circle.
pub struct PhaseGrid<T: Scalar> {
    grid: Arc<Grid2D<T>>,
    fiber: Arc<FiberGrid<T>>,
    pub(crate) fft: Fft3<T>,
    keep: Vec<bool>,
}

impl<T: Scalar> std::fmt::Debug for PhaseGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseGrid").field("grid", &self.grid).field("fiber", &self.fiber).finish()
    }
}

impl<T: Scalar> PhaseGrid<T> {
    pub fn new(grid: &Arc<Grid2D<T>>, fiber: &Arc<FiberGrid<T>>) -> Arc<Self> {
        let nxy = grid.len();
        let (gk, fk) = (grid.dealias_mask(), fiber.dealias_mask());
        let keep = (0..nxy * fiber.nm()).map(|i| gk[i % nxy] && fk[i / nxy]).collect();
        Arc::new(Self { grid: grid.clone(), fiber: fiber.clone(), fft: Fft3::new([fiber.nm(), grid.nx(), grid.ny()]), keep })
    }

    pub fn grid(&self) -> &Arc<Grid2D<T>> {
        &self.grid
    }

    pub fn fiber(&self) -> &Arc<FiberGrid<T>> {
        &self.fiber
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.grid.len()
    }

    pub(crate) fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.grid.spec() == other.grid.spec() && self.fiber.nm() == other.fiber.nm())
    }

    /// Volume element of the phase-space collocation rule.
    pub fn cell_volume(&self) -> T {
        T::of(8.0 * PI * PI * PI / self.len() as f64)
    }

    fn dealias(&self, coeffs: &mut [Complex<T>]) {
        coeffs.par_iter_mut().zip(self.keep.par_iter()).for_each(|(c, &k)| {
            if !k {
                *c = Complex::new(T::zero(), T::zero());
            }
        });
    }

    /// Forward transform without truncation (exact on the grid).
    pub(crate) fn to_coeffs(&self, values: &[T]) -> Vec<Complex<T>> {
        self.fft.forward_real(values)
    }

    pub(crate) fn to_values(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        self.fft.inverse_real(coeffs)
    }

    /// Undo the spatial transform only: angular amplitudes at every site,
    /// laid out `[k_theta][x][y]`.
    pub(crate) fn angular_amplitudes(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut d = coeffs.to_vec();
        self.fft.inverse_axes(&mut d, &[1, 2]);
        d
    }

    /// Forward transform of collocation values followed by band truncation.
    pub(crate) fn forward_dealiased(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut c = self.fft.forward_real(values);
        self.dealias(&mut c);
        c
    }
}

/// Orientation density over the phase grid, stored as Fourier amplitudes.
#[derive(Clone, Debug)]
pub struct PhaseField<T: Scalar> {
    pg: Arc<PhaseGrid<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> PhaseField<T> {
    pub fn zeros(pg: &Arc<PhaseGrid<T>>) -> Self {
        Self { pg: pg.clone(), coeffs: vec![Complex::new(T::zero(), T::zero()); pg.len()] }
    }

    /// Angle-major collocation values, truncated to the dealiased band.
    pub fn from_values(pg: &Arc<PhaseGrid<T>>, values: &[T]) -> Result<Self> {
        if values.len() != pg.len() {
            return Err(Error::Grid(format!("expected {} phase values, got {}", pg.len(), values.len())));
        }
        Ok(Self { pg: pg.clone(), coeffs: pg.forward_dealiased(values) })
    }

    /// Values in `(x, y, theta)` order (theta fastest), as written to snapshots.
    pub fn from_values_xyt(pg: &Arc<PhaseGrid<T>>, values: &[T]) -> Result<Self> {
        if values.len() != pg.len() {
            return Err(Error::Grid(format!("expected {} phase values, got {}", pg.len(), values.len())));
        }
        let (nxy, nm) = (pg.sites(), pg.fiber.nm());
        let reordered: Vec<T> = (0..pg.len()).map(|i| values[(i % nxy) * nm + i / nxy]).collect();
        Self::from_values(pg, &reordered)
    }

    pub fn from_fn(pg: &Arc<PhaseGrid<T>>, f: impl Fn(T, T, T) -> T) -> Self {
        let g = &pg.grid;
        let (nxy, ny) = (g.len(), g.ny());
        let values: Vec<T> = (0..pg.len())
            .map(|i| {
                let m = i % nxy;
                f(g.x(m / ny), g.y(m % ny), pg.fiber.theta(i / nxy))
            })
            .collect();
        Self { pg: pg.clone(), coeffs: pg.forward_dealiased(&values) }
    }

    pub fn phase_grid(&self) -> &Arc<PhaseGrid<T>> {
        &self.pg
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.pg.same(&other.pg) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Angle-major collocation values.
    pub fn values(&self) -> Vec<T> {
        self.pg.fft.inverse_real(&self.coeffs)
    }

    /// Collocation values in `(x, y, theta)` order.
    pub fn values_xyt(&self) -> Vec<T> {
        let v = self.values();
        let (nxy, nm) = (self.pg.sites(), self.pg.fiber.nm());
        (0..v.len()).map(|o| v[(o % nm) * nxy + o / nm]).collect()
    }

    pub(crate) fn map(&self, f: impl Fn(usize, Complex<T>) -> Complex<T> + Sync) -> Self {
        Self { pg: self.pg.clone(), coeffs: self.coeffs.par_iter().enumerate().map(|(i, &c)| f(i, c)).collect() }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|_, c| c * s)
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.map(|i, c| c + other.coeffs[i]))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.map(|i, c| c - other.coeffs[i]))
    }

    /// Multiply by an x-multiplier table of length `nx * ny`.
    pub fn apply_x(&self, weights: &[T]) -> Self {
        let n = weights.len();
        self.map(|i, c| c * weights[i % n])
    }

    /// Multiply by an angular multiplier table of length `nm`.
    pub fn apply_theta(&self, weights: &[T]) -> Self {
        let nxy = self.pg.sites();
        self.map(|i, c| c * weights[i / nxy])
    }

    pub fn apply_theta_complex(&self, weights: &[Complex<T>]) -> Self {
        let nxy = self.pg.sites();
        self.map(|i, c| c * weights[i / nxy])
    }

    /// Spatial derivative along `axis` (0 = x, 1 = y).
    pub fn derivative_x(&self, axis: usize) -> Self {
        let g = self.pg.grid.clone();
        let nxy = g.len();
        self.map(move |i, c| c * Complex::new(T::zero(), g.kd(axis, i % nxy)))
    }

    /// `d/dtheta`, i.e. `grad_g` and `div_g` on the circle.
    pub fn derivative_theta(&self) -> Self {
        self.apply_theta_complex(&self.pg.fiber.derivative_weights())
    }

    pub fn laplace_beltrami(&self) -> Self {
        self.apply_theta(&self.pg.fiber.laplace_weights())
    }

    /// Dealiased pointwise product with another phase field.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let (a, b) = (self.values(), other.values());
        let p: Vec<T> = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| x * y).collect();
        Ok(Self { pg: self.pg.clone(), coeffs: self.pg.forward_dealiased(&p) })
    }

    /// `int int f dx dtheta`
    pub fn mass(&self) -> T {
        self.coeffs[0].re * T::of(8.0 * PI * PI * PI)
    }

    /// Site density `rho(x) = int f dtheta`.
    pub fn site_density(&self) -> SpectralField2D<T> {
        let nxy = self.pg.sites();
        let c = self.coeffs[..nxy].iter().map(|&z| z * T::of(2.0 * PI)).collect();
        SpectralField2D::from_coeffs(&self.pg.grid, c).expect("slice length")
    }

    pub fn min_value(&self) -> T {
        let v = self.values();
        -det_max(v.len(), |i| -v[i])
    }

    /// `(int int f^2)^(1/2)` by Parseval.
    pub fn l2_norm(&self) -> T {
        let c = &self.coeffs;
        (det_sum(c.len(), |i| c[i].norm_sqr()) * T::of(8.0 * PI * PI * PI)).sqrt()
    }

    pub fn max_abs_coeff(&self) -> T {
        let c = &self.coeffs;
        det_max(c.len(), |i| c[i].norm()).max(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Rotation-rate coefficients `c^{ij}(theta)` with `W = sum_ij c^{ij} d_j v_i`.
#[derive(Clone, Debug)]
pub struct DriftCoefficients<T: Scalar> {
    /// `table[i][j][theta index]`
    pub table: [[Vec<T>; 2]; 2],
}

impl<T: Scalar> DriftCoefficients<T> {
    /// Rigid rods: `theta' = m_perp . (grad v) m`, so `c^{ij} = m_perp_i m_j`.
    pub fn rigid_rod(fiber: &FiberGrid<T>) -> Self {
        let th: Vec<T> = (0..fiber.nm()).map(|j| fiber.theta(j)).collect();
        let m = |i: usize, t: T| if i == 0 { t.cos() } else { t.sin() };
        let mp = |i: usize, t: T| if i == 0 { -t.sin() } else { t.cos() };
        let entry = |i: usize, j: usize| th.iter().map(|&t| mp(i, t) * m(j, t)).collect();
        Self { table: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]] }
    }
}

/// One-particle profile `gamma1_ij(theta)` and quadratic-stress intensity.
///
/// The two-particle stress is `gamma2_ij(m1, m2) = -b2 (m1.m2)(m1_i m2_j + m2_i m1_j)/2`,
/// which integrates to `-b2 (M M)_ij` with `M_ij = int m_i m_j f dtheta`.
#[derive(Clone, Debug)]
pub struct StressCoefficients<T: Scalar> {
    /// `[gamma_11, gamma_12, gamma_22]` sampled on the angle grid.
    pub gamma1: [Vec<T>; 3],
    pub b2: T,
}

impl<T: Scalar> StressCoefficients<T> {
    /// `gamma1 = m m - I/2`.
    pub fn rigid_rod(fiber: &FiberGrid<T>, b2: T) -> Self {
        let th: Vec<T> = (0..fiber.nm()).map(|j| fiber.theta(j)).collect();
        let half = T::of(0.5);
        Self {
            gamma1: [
                th.iter().map(|&t| t.cos() * t.cos() - half).collect(),
                th.iter().map(|&t| t.cos() * t.sin()).collect(),
                th.iter().map(|&t| t.sin() * t.sin() - half).collect(),
            ],
            b2,
        }
    }
}

/// The Smoluchowski operator for a fixed kernel, drift and stress closure.
#[derive(Clone, Debug)]
pub struct Smoluchowski<T: Scalar> {
    pg: Arc<PhaseGrid<T>>,
    pub kernel: KernelSpec<T>,
    pub drift: DriftCoefficients<T>,
    pub stress: StressCoefficients<T>,
    /// Coefficient of `Delta_g f` (one in the model; zero disables fiber diffusion).
    pub diffusivity: T,
    pub cfl_safety: T,
    kernel_grad: Vec<Complex<T>>,
}

impl<T: Scalar> Smoluchowski<T> {
    /// Rigid-rod model with the given kernel; `b2` scales the quadratic stress.
    pub fn rigid_rod(pg: &Arc<PhaseGrid<T>>, kernel: KernelSpec<T>, b2: T) -> Self {
        let fiber = pg.fiber();
        let drift = DriftCoefficients::rigid_rod(fiber);
        let stress = StressCoefficients::rigid_rod(fiber, b2);
        Self::new(pg, kernel, drift, stress)
    }

    pub fn new(pg: &Arc<PhaseGrid<T>>, kernel: KernelSpec<T>, drift: DriftCoefficients<T>, stress: StressCoefficients<T>) -> Self {
        let kw = pg.fiber().kernel_weights(&kernel);
        let dw = pg.fiber().derivative_weights();
        let kernel_grad = kw.iter().zip(&dw).map(|(&k, &d)| d * k).collect();
        Self { pg: pg.clone(), kernel, drift, stress, diffusivity: T::one(), cfl_safety: T::of(0.5), kernel_grad }
    }

    pub fn phase_grid(&self) -> &Arc<PhaseGrid<T>> {
        &self.pg
    }

    /// `U = K f` at every site.
    pub fn potential(&self, f: &PhaseField<T>) -> PhaseField<T> {
        f.apply_theta(&self.pg.fiber().kernel_weights(&self.kernel))
    }

    /// `grad_g U` with `U = K f`.
    pub fn potential_gradient(&self, f: &PhaseField<T>) -> PhaseField<T> {
        f.apply_theta_complex(&self.kernel_grad)
    }

    /// Collocation values of `W = sum_ij c^{ij}(theta) d_j v_i(x)`.
    pub(crate) fn drift_w_values(&self, grad_v: &[[SpectralField2D<T>; 2]; 2]) -> Vec<T> {
        let nxy = self.pg.sites();
        let a: Vec<Vec<T>> = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| grad_v[i][j].to_physical()).collect();
        let c = &self.drift.table;
        let mut out = vec![T::zero(); self.pg.len()];
        out.par_chunks_mut(nxy).enumerate().for_each(|(t, slab)| {
            let w = [c[0][0][t], c[0][1][t], c[1][0][t], c[1][1][t]];
            for (m, o) in slab.iter_mut().enumerate() {
                *o = w[0] * a[0][m] + w[1] * a[1][m] + w[2] * a[2][m] + w[3] * a[3][m];
            }
        });
        out
    }

    /// `W` as a phase field.
    pub fn drift_w(&self, v: &VelocityField<T>) -> PhaseField<T> {
        let vals = self.drift_w_values(&v.gradient());
        PhaseField { pg: self.pg.clone(), coeffs: self.pg.fft.forward_real(&vals) }
    }

    fn drift_g_values(&self, v: &VelocityField<T>, f: &PhaseField<T>) -> Vec<T> {
        let mut g = self.pg.fft.inverse_real(&self.potential_gradient(f).coeffs);
        let w = self.drift_w_values(&v.gradient());
        g.par_iter_mut().zip(w.par_iter()).for_each(|(a, &b)| *a = *a + b);
        g
    }

    /// `G(v, f) = grad_g U + W`.
    pub fn drift_g(&self, v: &VelocityField<T>, f: &PhaseField<T>) -> PhaseField<T> {
        let vals = self.drift_g_values(v, f);
        PhaseField { pg: self.pg.clone(), coeffs: self.pg.fft.forward_real(&vals) }
    }

    /// `div_g(G(v, f) f)`, dealiased.
    pub fn drift_flux_divergence(&self, v: &VelocityField<T>, f: &PhaseField<T>) -> PhaseField<T> {
        let g = self.drift_g_values(v, f);
        let fv = f.values();
        let gf: Vec<T> = g.par_iter().zip(fv.par_iter()).map(|(&a, &b)| a * b).collect();
        PhaseField { pg: self.pg.clone(), coeffs: self.pg.forward_dealiased(&gf) }.derivative_theta()
    }

    /// Transport term `v . grad_x f`, evaluated in conservative form `div_x(v f)`
    /// (identical for divergence-free `v`; the zero mode is exactly zero).
    pub fn transport(&self, v: &VelocityField<T>, f: &PhaseField<T>) -> PhaseField<T> {
        let fv = f.values();
        let nxy = self.pg.sites();
        let [v1, v2] = v.physical();
        let flux = |vc: &[T]| -> PhaseField<T> {
            let p: Vec<T> = fv.par_iter().enumerate().map(|(i, &x)| x * vc[i % nxy]).collect();
            PhaseField { pg: self.pg.clone(), coeffs: self.pg.forward_dealiased(&p) }
        };
        let a = flux(&v1).derivative_x(0);
        let b = flux(&v2).derivative_x(1);
        a.plus(&b).expect("same grid")
    }

    /// Explicit part `-v.grad_x f - div_g(G f)`.
    pub fn explicit_rhs(&self, f: &PhaseField<T>, v: &VelocityField<T>) -> PhaseField<T> {
        let t = self.transport(v, f);
        let d = self.drift_flux_divergence(v, f);
        t.map(|i, c| -c - d.coeffs[i])
    }

    /// Full right-hand side `-v.grad_x f - div_g(G f) + Delta_g f`.
    pub fn fp_rhs(&self, f: &PhaseField<T>, v: &VelocityField<T>) -> PhaseField<T> {
        let e = self.explicit_rhs(f, v);
        let lap = f.laplace_beltrami();
        let d = self.diffusivity;
        e.map(|i, c| c + lap.coeffs[i] * d)
    }

    /// Per-angle-mode factor of the implicit fiber diffusion over one step:
    /// the Crank-Nicolson rational `(1 - D dt k^2/2) / (1 + D dt k^2/2)`.
    pub fn diffusion_factor(&self, dt: T) -> Vec<T> {
        let half = T::of(0.5);
        self.pg
            .fiber()
            .wavenumbers()
            .iter()
            .map(|&k| {
                let a = self.diffusivity * dt * k * k * half;
                (T::one() - a) / (T::one() + a)
            })
            .collect()
    }

    /// Largest admissible step for the explicit transport and drift terms.
    pub fn max_stable_dt(&self, f: &PhaseField<T>, v: &VelocityField<T>) -> T {
        let speed = v.max_speed();
        let g = self.drift_g_values(v, f);
        let gmax = det_max(g.len(), |i| g[i].abs()).max(T::zero());
        let mut limit = T::infinity();
        if speed > T::zero() {
            limit = limit.min(self.pg.grid().spacing() / speed);
        }
        if gmax > T::zero() {
            limit = limit.min(self.pg.fiber().spacing() / gmax);
        }
        limit * self.cfl_safety
    }

    pub fn check_cfl(&self, f: &PhaseField<T>, v: &VelocityField<T>, dt: T) -> Result<()> {
        let limit = self.max_stable_dt(f, v);
        if dt > limit {
            return Err(Error::Cfl(format!("kinetic step dt = {dt} exceeds limit {limit}")));
        }
        Ok(())
    }

    /// One IMEX step with the velocity frozen over the step.
    pub fn step(&self, f: &PhaseField<T>, v: &VelocityField<T>, dt: T) -> Result<PhaseField<T>> {
        if !(dt > T::zero()) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        self.check_cfl(f, v, dt)?;
        let r = self.diffusion_factor(dt);
        let n0 = self.explicit_rhs(f, v);
        let pred = f.map(|i, c| c + n0.coeffs[i] * dt).apply_theta(&r);
        let n1 = self.explicit_rhs(&pred, v);
        Ok(self.combine(f, &n0, &n1, &r, dt))
    }

    /// `R f + dt/2 (R n0 + n1)`, the Heun corrector in integrating-factor form.
    pub(crate) fn combine(&self, f: &PhaseField<T>, n0: &PhaseField<T>, n1: &PhaseField<T>, r: &[T], dt: T) -> PhaseField<T> {
        let nxy = self.pg.sites();
        let h = dt * T::of(0.5);
        f.map(|i, c| (c + n0.coeffs[i] * h) * r[i / nxy] + n1.coeffs[i] * h)
    }

    /// Angular moment `int g(theta) f dtheta` of a tabulated profile, per x-mode.
    fn moment(&self, f: &PhaseField<T>, profile: &[T]) -> SpectralField2D<T> {
        let fiber = self.pg.fiber();
        let ghat = fiber.fft.forward_real(profile);
        let nxy = self.pg.sites();
        let two_pi = T::of(2.0 * PI);
        let mut out = vec![Complex::new(T::zero(), T::zero()); nxy];
        for (t, gk) in ghat.iter().enumerate() {
            if gk.norm() <= T::epsilon() * T::of(16.0) {
                continue;
            }
            let w = gk.conj() * two_pi;
            let slab = &f.coeffs[t * nxy..(t + 1) * nxy];
            out.par_iter_mut().zip(slab.par_iter()).for_each(|(o, &c)| *o = *o + c * w);
        }
        SpectralField2D::from_coeffs(self.pg.grid(), out).expect("length")
    }

    /// Kinetic stress `tau = int gamma1 f + int int gamma2 f f`.
    pub fn stress_tau(&self, f: &PhaseField<T>) -> StressField<T> {
        let g = &self.stress.gamma1;
        let mut t11 = self.moment(f, &g[0]);
        let mut t12 = self.moment(f, &g[1]);
        let mut t22 = self.moment(f, &g[2]);
        if self.stress.b2 != T::zero() {
            let fiber = self.pg.fiber();
            let th: Vec<T> = (0..fiber.nm()).map(|j| fiber.theta(j)).collect();
            let m11 = self.moment(f, &th.iter().map(|&t| t.cos() * t.cos()).collect::<Vec<_>>());
            let m12 = self.moment(f, &th.iter().map(|&t| t.cos() * t.sin()).collect::<Vec<_>>());
            let m22 = self.moment(f, &th.iter().map(|&t| t.sin() * t.sin()).collect::<Vec<_>>());
            let p = |a: &SpectralField2D<T>, b: &SpectralField2D<T>| a.product(b).expect("same grid");
            let (a11, a12, a22) = (p(&m11, &m11), p(&m12, &m12), p(&m22, &m22));
            let mm11 = a11.plus(&a12).expect("grid");
            let mm22 = a12.plus(&a22).expect("grid");
            let mm12 = p(&m11, &m12).plus(&p(&m12, &m22)).expect("grid");
            let b2 = self.stress.b2;
            t11.axpy(-b2, &mm11).expect("grid");
            t12.axpy(-b2, &mm12).expect("grid");
            t22.axpy(-b2, &mm22).expect("grid");
        }
        StressField::new(t11, t12, t22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::GridSpec2D;

    fn model(n: usize, nm: usize, b: f64) -> Smoluchowski<f64> {
        let g = Grid2D::new(GridSpec2D::new(n, n).unwrap()).unwrap();
        let m = FiberGrid::new(nm, 2.0 / 3.0).unwrap();
        let pg = PhaseGrid::new(&g, &m);
        Smoluchowski::rigid_rod(&pg, KernelSpec::maier_saupe(b), b)
    }

    #[test]
    fn layout_round_trip() {
        let sm = model(8, 8, 0.0);
        let pg = sm.phase_grid();
        let f = PhaseField::from_fn(pg, |x, y, t| 1.0 + 0.1 * x.cos() * (2.0 * t).sin() + 0.05 * y.sin());
        let xyt = f.values_xyt();
        let g = PhaseField::from_values_xyt(pg, &xyt).unwrap();
        assert!(f.minus(&g).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn rotation_drift_is_uniform() {
        let sm = model(16, 16, 0.0);
        let g = sm.phase_grid().grid().clone();
        // v = omega (-y', x') realized by a periodic shear pair: grad v = [[0, -w], [w, 0]] at the origin
        let v = VelocityField::from_fns(&g, |_, y| -y.sin(), |x, _| x.sin());
        let w = sm.drift_w(&v).values();
        // at x = y = 0 the local gradient is a pure rotation with omega = 1
        let nxy = g.len();
        for t in 0..16 {
            assert!((w[t * nxy] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn mass_zero_mode_untouched_by_rhs() {
        let sm = model(16, 16, 1.0);
        let pg = sm.phase_grid().clone();
        let g = pg.grid().clone();
        let v = VelocityField::taylor_green(&g, 1.0);
        let f = PhaseField::from_fn(&pg, |x, y, t| (1.0 + 0.3 * (2.0 * t).cos() + 0.2 * x.sin() * y.cos() * t.sin()) / (2.0 * PI));
        let r = sm.fp_rhs(&f, &v);
        assert!(r.coeffs()[0].norm() < 1e-16);
    }

    #[test]
    fn rejects_nonpositive_dt() {
        let sm = model(8, 8, 0.0);
        let pg = sm.phase_grid().clone();
        let f = PhaseField::from_fn(&pg, |_, _, _| 1.0);
        let v = VelocityField::zeros(pg.grid());
        assert!(sm.step(&f, &v, 0.0).is_err());
    }
}
