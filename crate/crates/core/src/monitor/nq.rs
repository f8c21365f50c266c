//! Site-wise angular quantities of a block: `N_q` and the quadratic form `V`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::error::Result;
use crate::fluid::VelocityField;
use crate::kinetic::{PhaseField, Smoluchowski};
use crate::lp::{s_q, Collocation2D};
use crate::scalar::{det_max, Scalar};

/// `2pi sum_k |a_k|^2` at every site for angular amplitudes laid out `[k][site]`.
fn site_norm_sq<T: Scalar>(amps: &[Complex<T>], nxy: usize) -> Vec<T> {
    let nm = amps.len() / nxy;
    let two_pi = T::of(2.0 * PI);
    (0..nxy).into_par_iter().map(|m| (0..nm).fold(T::zero(), |a, k| a + amps[k * nxy + m].norm_sqr()) * two_pi).collect()
}

/// `2pi sum_k Re(a_k conj(b_k))` at every site.
fn site_inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>], nxy: usize) -> Vec<T> {
    let nm = a.len() / nxy;
    let two_pi = T::of(2.0 * PI);
    (0..nxy).into_par_iter().map(|m| (0..nm).fold(T::zero(), |acc, k| acc + (a[k * nxy + m] * b[k * nxy + m].conj()).re) * two_pi).collect()
}

pub(crate) fn n_q_values<T: Scalar>(f: &PhaseField<T>, q: i32, s: T) -> Result<Vec<T>> {
    let pg = f.phase_grid();
    let nxy = pg.sites();
    let h = pg.fiber().smoothing_weights(s)?;
    let Some(w) = pg.grid().ladder().block_weights(q) else {
        log::warn!("n_q_field: block {q} outside ladder range");
        return Ok(vec![T::zero(); nxy]);
    };
    let c: Vec<Complex<T>> = f.coeffs().par_iter().enumerate().map(|(i, &z)| z * (w[i % nxy] * h[i / nxy])).collect();
    let amps = pg.angular_amplitudes(&c);
    Ok(site_norm_sq(&amps, nxy).into_iter().map(|x| x.sqrt()).collect())
}

/// `N_q(x) = (int |H Delta_q f|^2 dtheta)^(1/2)`.
pub fn n_q_field<T: Scalar>(f: &PhaseField<T>, q: i32, s: T) -> Result<Collocation2D<T>> {
    Collocation2D::new(f.phase_grid().grid(), n_q_values(f, q, s)?)
}

/// Site values of `V(v, h, g)` and the size of `|V| / ((|grad v| + ||h||_{L^2(M)}) N^2)`.
#[derive(Clone, Debug)]
pub struct VForm<T: Scalar> {
    pub values: Collocation2D<T>,
    pub ratio_sup: T,
}

/// `V(v, h, g) = d_j v_i int H div_g(c^{ij} g) H g + int H div_g(grad_g(K h) g) H g`.
pub fn v_form<T: Scalar>(model: &Smoluchowski<T>, v: &VelocityField<T>, h: &PhaseField<T>, g: &PhaseField<T>, s: T) -> Result<VForm<T>> {
    h.check_same_grid(g)?;
    let pg = g.phase_grid().clone();
    let nxy = pg.sites();
    let hw = pg.fiber().smoothing_weights(s)?;
    let dth = pg.fiber().derivative_weights();
    // H d/dtheta of the spectrum of a collocation product, undone in x only
    let smooth_div = |vals: &[T]| {
        let c: Vec<Complex<T>> = pg.to_coeffs(vals).into_par_iter().enumerate().map(|(i, z)| z * dth[i / nxy] * hw[i / nxy]).collect();
        pg.angular_amplitudes(&c)
    };
    let gv = g.values();
    let hg: Vec<Complex<T>> = g.coeffs().par_iter().enumerate().map(|(i, &z)| z * hw[i / nxy]).collect();
    let hg = pg.angular_amplitudes(&hg);

    let grad = v.gradient();
    let mut out = vec![T::zero(); nxy];
    let mut grad_norm_sq = vec![T::zero(); nxy];
    for i in 0..2 {
        for j in 0..2 {
            let a = grad[i][j].to_physical();
            let c = &model.drift.table[i][j];
            let prod: Vec<T> = gv.par_iter().enumerate().map(|(k, &x)| x * c[k / nxy]).collect();
            let inner = site_inner(&smooth_div(&prod), &hg, nxy);
            for m in 0..nxy {
                out[m] = out[m] + a[m] * inner[m];
                grad_norm_sq[m] = grad_norm_sq[m] + a[m] * a[m];
            }
        }
    }
    let du = pg.to_values(model.potential_gradient(h).coeffs());
    let prod: Vec<T> = du.par_iter().zip(gv.par_iter()).map(|(&a, &b)| a * b).collect();
    let inner = site_inner(&smooth_div(&prod), &hg, nxy);
    out.iter_mut().zip(&inner).for_each(|(o, &x)| *o = *o + x);

    let h_sq = site_norm_sq(&pg.angular_amplitudes(h.coeffs()), nxy);
    let n_sq = site_norm_sq(&hg, nxy);
    let tiny = T::epsilon() * T::of(1e3);
    let ratio: Vec<T> = (0..nxy)
        .map(|m| {
            let den = (grad_norm_sq[m].sqrt() + h_sq[m].sqrt()) * n_sq[m];
            if den > tiny {
                out[m].abs() / den
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(VForm { ratio_sup: det_max(nxy, |m| ratio[m]).max(T::zero()), values: Collocation2D::new(pg.grid(), out)? })
}

/// `V(S_{q-1} v, S_{q-1} f, Delta_q f)`, the form appearing in the block energy balance.
pub fn v_form_block<T: Scalar>(model: &Smoluchowski<T>, v: &VelocityField<T>, f: &PhaseField<T>, q: i32, s: T) -> Result<VForm<T>> {
    let low_v = v.map(|c| s_q(c, q - 1));
    let low_f = f.apply_x(&x_low_pass(f, q - 1));
    let fq = f.apply_x(&x_block(f, q));
    v_form(model, &low_v, &low_f, &fq, s)
}

fn x_low_pass<T: Scalar>(f: &PhaseField<T>, q: i32) -> Vec<T> {
    let g = f.phase_grid().grid();
    g.ladder().low_pass_weights(q).map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); g.len()])
}

fn x_block<T: Scalar>(f: &PhaseField<T>, q: i32) -> Vec<T> {
    let g = f.phase_grid().grid();
    g.ladder().block_weights(q).map(<[T]>::to_vec).unwrap_or_else(|| vec![T::zero(); g.len()])
}
