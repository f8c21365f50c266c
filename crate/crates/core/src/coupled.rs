//! Synchronous time stepping of the coupled fluid / orientation system.

use crate::error::{Error, Result};
use crate::fluid::{self, VelocityField};
use crate::kinetic::{PhaseField, Smoluchowski};
use crate::scalar::Scalar;

/// State of a run at one instant.
#[derive(Clone, Debug)]
pub struct CoupledState<T: Scalar> {
    pub t: T,
    pub step: u64,
    pub v: VelocityField<T>,
    pub f: PhaseField<T>,
}

/// Fluid viscosity together with the kinetic model.
#[derive(Clone, Debug)]
pub struct CoupledSystem<T: Scalar> {
    pub model: Smoluchowski<T>,
    pub nu: T,
}

impl<T: Scalar> CoupledSystem<T> {
    pub fn new(model: Smoluchowski<T>, nu: T) -> Result<Self> {
        if !(nu >= T::zero()) {
            return Err(Error::Domain(format!("viscosity must be non-negative, got {nu}")));
        }
        Ok(Self { model, nu })
    }

    /// Both explicit right-hand sides at one stage.
    fn stage(&self, v: &VelocityField<T>, f: &PhaseField<T>) -> Result<(VelocityField<T>, PhaseField<T>)> {
        let tau = self.model.stress_tau(f);
        let nv = fluid::explicit_rhs(v, &tau)?;
        let nf = self.model.explicit_rhs(f, v);
        Ok((nv, nf))
    }

    /// Largest step accepted by [`CoupledSystem::step`] from `state`.
    pub fn max_stable_dt(&self, state: &CoupledState<T>) -> T {
        self.model.max_stable_dt(&state.f, &state.v)
    }

    /// One integrating-factor Heun step advancing `v` and `f` together: both
    /// stages evaluate the stress and the velocity gradient at the same stage values.
    pub fn step(&self, state: &CoupledState<T>, dt: T) -> Result<CoupledState<T>> {
        if !(dt > T::zero()) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        let limit = self.max_stable_dt(state);
        if dt > limit {
            return Err(Error::Cfl(format!("step {} at t = {}: dt = {dt} exceeds limit {limit}", state.step, state.t)));
        }
        let grid = state.v.grid();
        let ev = fluid::viscous_factor(grid, self.nu, dt);
        let rf = self.model.diffusion_factor(dt);

        let (nv0, nf0) = self.stage(&state.v, &state.f)?;
        let v_pred = state.v.plus(&nv0.scaled(dt))?.map(|c| c.apply_multiplier(&ev));
        let f_pred = state.f.plus(&nf0.scaled(dt))?.apply_theta(&rf);
        let (nv1, nf1) = self.stage(&v_pred, &f_pred)?;

        let v = fluid::heun_combine(&state.v, &nv0, &nv1, &ev, dt);
        let f = self.model.combine(&state.f, &nf0, &nf1, &rf, dt);
        if !v.is_finite() || !f.is_finite() {
            return Err(Error::NonFinite(state.t.to_f64_lossy()));
        }
        Ok(CoupledState { t: state.t + dt, step: state.step + 1, v, f })
    }
}
