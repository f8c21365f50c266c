//! Per-block time series of a run and the time-integrated functionals built on them.

use crate::error::{Error, Result};
use crate::fluid::{energy_budget, VelocityField};
use crate::kinetic::{PhaseField, Smoluchowski};
use crate::lp::bony::stack2d;
use crate::lp::norms::lebesgue_norm_values;
use crate::lp::LOW_BLOCK;
use crate::monitor::nq::n_q_values;
use crate::scalar::{det_max, det_sum, Scalar};

/// Parameters fixed when a ledger is opened.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerParams {
    pub nu: f64,
    /// Order of the angular smoothing `H = (I - Delta_g)^{-s/2}`.
    pub s: f64,
    /// Spatial Lebesgue exponent of the block norms (`f64::INFINITY` allowed).
    pub p: f64,
}

impl Default for LedgerParams {
    fn default() -> Self {
        Self { nu: 0.1, s: 2.0, p: f64::INFINITY }
    }
}

/// One sample. Per-block vectors are indexed by `q - LOW_BLOCK`.
#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub stress_power: f64,
    pub mass: f64,
    pub min_f: f64,
    pub grad_v_inf: f64,
    /// Inhomogeneous `H^{1/2}` norm of the velocity.
    pub h_half: f64,
    /// `||Delta_q grad v||_inf`
    pub dgv: Vec<f64>,
    /// `||S_{q-1} grad v||_inf`
    pub sgv: Vec<f64>,
    /// `||Delta_q v||_{L^p}`
    pub dv: Vec<f64>,
    /// `||N_q||_{L^p}`
    pub nq: Vec<f64>,
}

/// Value of the heat-weighted history functional and its ratio to the reference bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatFunctional {
    pub value: f64,
    pub bound_ratio: f64,
}

/// Append-only table of samples.
#[derive(Clone, Debug)]
pub struct RegularityLedger {
    params: LedgerParams,
    q_max: i32,
    rows: Vec<LedgerRow>,
    /// Running trapezoidal integrals from the first sample, per row and block.
    cum_sgv: Vec<Vec<f64>>,
    cum_dgv: Vec<Vec<f64>>,
}

const TIME_TOL: f64 = 1e-12;

fn pointwise_norm<T: Scalar>(parts: &[&[T]], n: usize) -> Vec<T> {
    (0..n).map(|m| parts.iter().fold(T::zero(), |a, p| a + p[m] * p[m]).sqrt()).collect()
}

fn max_of<T: Scalar>(v: &[T]) -> f64 {
    det_max(v.len(), |i| v[i]).max(T::zero()).to_f64_lossy()
}

/// Compute one ledger row from the state at time `t`.
pub fn sample_row<T: Scalar>(model: &Smoluchowski<T>, v: &VelocityField<T>, f: &PhaseField<T>, t: f64, params: &LedgerParams) -> Result<LedgerRow> {
    let grid = v.grid().clone();
    let ladder = grid.ladder();
    let n = grid.len();
    let tau = model.stress_tau(f);
    let eb = energy_budget(v, &tau, T::of(params.nu));

    let grad = v.gradient();
    let comps = [&grad[0][0], &grad[0][1], &grad[1][0], &grad[1][1]];
    let gstacks: Vec<_> = comps.iter().map(|c| stack2d(c)).collect();
    let vstacks = [stack2d(&v.u[0]), stack2d(&v.u[1])];
    let full: Vec<Vec<T>> = comps.iter().map(|c| c.to_physical()).collect();
    let grad_v_inf = max_of(&pointwise_norm(&full.iter().map(|x| x.as_slice()).collect::<Vec<_>>(), n));

    let zero = vec![T::zero(); n];
    let mut low = vec![vec![T::zero(); n]; 4];
    let (mut dgv, mut sgv, mut dv, mut nq) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for q in ladder.blocks() {
        for (c, st) in gstacks.iter().enumerate() {
            if let Some(b) = st.block(q - 2) {
                low[c].iter_mut().zip(b).for_each(|(l, &x)| *l = *l + x);
            }
        }
        let blk: Vec<&[T]> = gstacks.iter().map(|st| st.block(q).unwrap_or(&zero)).collect();
        dgv.push(max_of(&pointwise_norm(&blk, n)));
        sgv.push(max_of(&pointwise_norm(&low.iter().map(|x| x.as_slice()).collect::<Vec<_>>(), n)));
        let vb: Vec<&[T]> = vstacks.iter().map(|st| st.block(q).unwrap_or(&zero)).collect();
        dv.push(lebesgue_norm_values(&pointwise_norm(&vb, n), grid.cell_area(), params.p).to_f64_lossy());
        let nqv = n_q_values(f, q, T::of(params.s))?;
        nq.push(lebesgue_norm_values(&nqv, grid.cell_area(), params.p).to_f64_lossy());
    }

    let k2 = grid.k_squared();
    let h_half = v
        .u
        .iter()
        .map(|c| {
            let z = c.coeffs();
            det_sum(z.len(), |m| z[m].norm_sqr() * (T::one() + k2[m]).sqrt())
        })
        .fold(T::zero(), |a, b| a + b)
        * grid.area();

    Ok(LedgerRow {
        t,
        energy: eb.energy.to_f64_lossy(),
        dissipation: eb.dissipation.to_f64_lossy(),
        stress_power: eb.stress_power.to_f64_lossy(),
        mass: f.mass().to_f64_lossy(),
        min_f: f.min_value().to_f64_lossy(),
        grad_v_inf,
        h_half: h_half.sqrt().to_f64_lossy(),
        dgv,
        sgv,
        dv,
        nq,
    })
}

/// Exact integral of `exp(-c (t - t')) h(t')` over `[a, b]` with `h` linear from `ha` to `hb`.
fn exp_weighted_piece(c: f64, t: f64, a: f64, b: f64, ha: f64, hb: f64) -> f64 {
    let d = b - a;
    if d <= 0.0 {
        return 0.0;
    }
    let cd = c * d;
    if cd < 1e-8 {
        let (ea, eb) = ((-c * (t - a)).exp(), (-c * (t - b)).exp());
        return 0.5 * d * (ea * ha + eb * hb);
    }
    let eb = (-c * (t - b)).exp();
    let m = (hb - ha) / d;
    let one_minus = -(-cd).exp_m1();
    // cd + expm1(-cd), by series where it cancels
    let tail = if cd < 1e-3 { cd * cd / 2.0 - cd.powi(3) / 6.0 + cd.powi(4) / 24.0 } else { cd + (-cd).exp_m1() };
    eb * (ha * one_minus / c + m * tail / (c * c))
}

impl RegularityLedger {
    pub fn new(params: LedgerParams, q_max: i32) -> Self {
        Self { params, q_max, rows: Vec::new(), cum_sgv: Vec::new(), cum_dgv: Vec::new() }
    }

    pub fn params(&self) -> &LedgerParams {
        &self.params
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        LOW_BLOCK..=self.q_max
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// Append a precomputed row (used when reloading a diagnostics file).
    pub fn push_row(&mut self, row: LedgerRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::NonMonotoneTime { t: row.t, last: last.t });
            }
        }
        let nb = (self.q_max - LOW_BLOCK + 1) as usize;
        if [row.dgv.len(), row.sgv.len(), row.dv.len(), row.nq.len()].iter().any(|&l| l != nb) {
            return Err(Error::Range(format!("row at t = {} does not carry {nb} blocks", row.t)));
        }
        let (cs, cd) = match (self.rows.last(), self.cum_sgv.last(), self.cum_dgv.last()) {
            (Some(prev), Some(ps), Some(pd)) => {
                let h = 0.5 * (row.t - prev.t);
                (
                    (0..nb).map(|i| ps[i] + h * (prev.sgv[i] + row.sgv[i])).collect(),
                    (0..nb).map(|i| pd[i] + h * (prev.dgv[i] + row.dgv[i])).collect(),
                )
            }
            _ => (vec![0.0; nb], vec![0.0; nb]),
        };
        self.cum_sgv.push(cs);
        self.cum_dgv.push(cd);
        self.rows.push(row);
        Ok(())
    }

    /// `int_{t_first}^t` of the block column `col` whose running integral is `cum`.
    fn prefix(&self, cum: &[Vec<f64>], b: usize, col: fn(&LedgerRow) -> &[f64], t: f64) -> f64 {
        let k = self.rows.partition_point(|r| r.t <= t);
        if k == 0 {
            return 0.0;
        }
        let i = k - 1;
        let base = cum[i][b];
        if i + 1 >= self.rows.len() || t <= self.rows[i].t {
            return base;
        }
        let (ra, rb) = (&self.rows[i], &self.rows[i + 1]);
        let ga = col(ra)[b];
        let gt = ga + (col(rb)[b] - ga) * (t - ra.t) / (rb.t - ra.t);
        base + 0.5 * (t - ra.t) * (ga + gt)
    }

    /// Sample the state and append it.
    pub fn record_sample<T: Scalar>(&mut self, model: &Smoluchowski<T>, v: &VelocityField<T>, f: &PhaseField<T>, t: f64) -> Result<&LedgerRow> {
        if let Some(last) = self.rows.last() {
            if !(t > last.t) {
                return Err(Error::NonMonotoneTime { t, last: last.t });
            }
        }
        let row = sample_row(model, v, f, t, &self.params)?;
        self.push_row(row)?;
        Ok(self.rows.last().expect("just pushed"))
    }

    fn idx(&self, q: i32) -> Result<usize> {
        if q < LOW_BLOCK || q > self.q_max {
            return Err(Error::Range(format!("block {q} outside [{LOW_BLOCK}, {}]", self.q_max)));
        }
        Ok((q - LOW_BLOCK) as usize)
    }

    fn check_span(&self, lo: f64, hi: f64) -> Result<()> {
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return Err(Error::Range("ledger is empty".into()));
        };
        if hi < lo || lo < first.t - TIME_TOL || hi > last.t + TIME_TOL {
            return Err(Error::Range(format!("interval [{lo}, {hi}] not within sampled [{}, {}]", first.t, last.t)));
        }
        Ok(())
    }

    /// Integral over `[lo, hi]` of the piecewise-linear interpolant of `g` (trapezoidal on samples).
    pub fn integrate(&self, lo: f64, hi: f64, g: impl Fn(&LedgerRow) -> f64) -> Result<f64> {
        self.check_span(lo, hi)?;
        let mut acc = 0.0;
        for w in self.rows.windows(2) {
            let (a, b) = (w[0].t, w[1].t);
            let (l, h) = (a.max(lo), b.min(hi));
            if h <= l {
                continue;
            }
            let (ga, gb) = (g(&w[0]), g(&w[1]));
            let at = |x: f64| ga + (gb - ga) * (x - a) / (b - a);
            acc += 0.5 * (h - l) * (at(l) + at(h));
        }
        Ok(acc)
    }

    /// `Phi_{q,lambda}(t, t') = lambda int_{t'}^t (||S_{q-1} grad v|| + 1)`.
    pub fn phi(&self, q: i32, lambda: f64, t: f64, t_prime: f64) -> Result<f64> {
        let i = self.idx(q)?;
        self.check_span(t_prime, t)?;
        let int = self.prefix(&self.cum_sgv, i, |r| &r.sgv, t) - self.prefix(&self.cum_sgv, i, |r| &r.sgv, t_prime);
        Ok(lambda * (int + (t - t_prime)))
    }

    /// `sup_{n, q} 2^{q sigma - Phi_{q,lambda}(t_n, t0)} value(row_n, q)` over samples in `[t0, t1]`.
    fn weighted_sup(&self, sigma: f64, lambda: f64, t0: f64, t1: f64, value: impl Fn(&LedgerRow, usize) -> f64) -> Result<f64> {
        self.check_span(t0, t1)?;
        let mut best = 0.0f64;
        for q in self.blocks() {
            let i = self.idx(q)?;
            for r in self.rows.iter().filter(|r| r.t >= t0 - TIME_TOL && r.t <= t1 + TIME_TOL) {
                let phi = self.phi(q, lambda, r.t.max(t0), t0)?;
                let w = (f64::from(q) * sigma - phi).exp2() * value(r, i);
                if w.is_nan() {
                    return Ok(f64::NAN);
                }
                best = best.max(w);
            }
        }
        Ok(best)
    }

    fn span(&self) -> Result<(f64, f64)> {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => Ok((a.t, b.t)),
            _ => Err(Error::Range("ledger is empty".into())),
        }
    }

    /// `M^sigma_lambda(v)` over the whole record (pass `sigma + 1` for the velocity functional of the estimate).
    pub fn m_sigma_lambda_v(&self, sigma: f64, lambda: f64) -> Result<f64> {
        let (a, b) = self.span()?;
        self.m_sigma_lambda_v_on(sigma, lambda, a, b)
    }

    pub fn m_sigma_lambda_v_on(&self, sigma: f64, lambda: f64, t0: f64, t1: f64) -> Result<f64> {
        self.weighted_sup(sigma, lambda, t0, t1, |r, i| r.dv[i])
    }

    /// `M^sigma_lambda(f)` with block sizes `||N_q||_{L^p}`.
    pub fn m_sigma_lambda_f(&self, sigma: f64, lambda: f64) -> Result<f64> {
        let (a, b) = self.span()?;
        self.m_sigma_lambda_f_on(sigma, lambda, a, b)
    }

    pub fn m_sigma_lambda_f_on(&self, sigma: f64, lambda: f64, t0: f64, t1: f64) -> Result<f64> {
        self.weighted_sup(sigma, lambda, t0, t1, |r, i| r.nq[i])
    }

    /// Per sample `n`: `M^sigma_lambda(f)`, `M^{sigma+1}_lambda(v)` and the gradient
    /// norm over `[t_first, t_n]`.
    pub fn running(&self, sigma: f64, lambda: f64) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.rows.len());
        let (mut mf, mut mv) = (0.0f64, 0.0f64);
        let t_first = self.rows.first().map_or(0.0, |r| r.t);
        for (n, r) in self.rows.iter().enumerate() {
            let mut tilde = 0.0f64;
            for q in self.blocks() {
                let i = (q - LOW_BLOCK) as usize;
                let phi = lambda * (self.cum_sgv[n][i] + (r.t - t_first));
                mf = mf.max((f64::from(q) * sigma - phi).exp2() * r.nq[i]);
                mv = mv.max((f64::from(q) * (sigma + 1.0) - phi).exp2() * r.dv[i]);
                tilde = tilde.max(self.cum_dgv[n][i]);
            }
            out.push([mf, mv, tilde]);
        }
        out
    }

    /// `sup_q int_{t0}^{t1} ||Delta_q grad v||_inf dt`.
    pub fn tilde_l1_c0(&self, t0: f64, t1: f64) -> Result<f64> {
        self.check_span(t0, t1)?;
        let mut best = 0.0f64;
        for q in self.blocks() {
            let i = self.idx(q)?;
            best = best.max(self.prefix(&self.cum_dgv, i, |r| &r.dgv, t1) - self.prefix(&self.cum_dgv, i, |r| &r.dgv, t0));
        }
        Ok(best)
    }

    /// Smallest sample `t0 < t1` with `tilde_l1_c0(t0, t1) <= eps`; `None` when no sample qualifies.
    pub fn find_t0(&self, eps: f64, t1: f64) -> Result<Option<f64>> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
        }
        self.check_span(t1, t1)?;
        for r in self.rows.iter().filter(|r| r.t < t1 - TIME_TOL) {
            if self.tilde_l1_c0(r.t, t1)? <= eps {
                return Ok(Some(r.t));
            }
        }
        Ok(None)
    }

    /// Smallest `eps` for which [`RegularityLedger::find_t0`] succeeds: the norm over the last sampled interval before `t1`.
    pub fn t0_floor(&self, t1: f64) -> Result<f64> {
        self.check_span(t1, t1)?;
        match self.rows.iter().rev().find(|r| r.t < t1 - TIME_TOL) {
            Some(r) => self.tilde_l1_c0(r.t, t1),
            None => Err(Error::Range(format!("no sample before t = {t1}"))),
        }
    }

    /// `F_q(t0, t1) = sup_t int_{t0}^t exp(-c nu 4^q (t - t')) ||v(t')||_{H^{1/2}} dt'` with `c = 1/4`,
    /// integrating the exponential exactly against the interpolated history.
    pub fn f_q_heat_functional(&self, q: i32, nu: f64, t0: f64, t1: f64) -> Result<HeatFunctional> {
        self.check_span(t0, t1)?;
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
        }
        let c = 0.25 * nu * f64::from(q).exp2().powi(2);
        let window: Vec<&LedgerRow> = self.rows.iter().filter(|r| r.t >= t0 - TIME_TOL && r.t <= t1 + TIME_TOL).collect();
        let mut best = 0.0f64;
        for (k, r) in window.iter().enumerate() {
            let mut acc = 0.0;
            for w in window[..=k].windows(2) {
                acc += exp_weighted_piece(c, r.t, w[0].t, w[1].t, w[0].h_half, w[1].h_half);
            }
            best = best.max(acc);
        }
        let l4 = self.integrate(t0, t1, |r| r.h_half.powi(4))?.powf(0.25);
        let reference = (-1.5 * f64::from(q)).exp2() * nu.powf(-0.75) * l4;
        let bound_ratio = if reference > 0.0 { best / reference } else { 0.0 };
        Ok(HeatFunctional { value: best, bound_ratio })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, sgv: f64, dgv: f64, h: f64) -> LedgerRow {
        let nb = 3;
        LedgerRow {
            t,
            energy: 0.0,
            dissipation: 0.0,
            stress_power: 0.0,
            mass: 1.0,
            min_f: 0.0,
            grad_v_inf: 0.0,
            h_half: h,
            dgv: vec![dgv; nb],
            sgv: vec![sgv; nb],
            dv: vec![0.0; nb],
            nq: vec![0.0; nb],
        }
    }

    fn ledger(rows: impl IntoIterator<Item = LedgerRow>) -> RegularityLedger {
        let mut l = RegularityLedger::new(LedgerParams::default(), 1);
        for r in rows {
            l.push_row(r).unwrap();
        }
        l
    }

    #[test]
    fn phi_zero_field_and_additivity() {
        let l = ledger((0..11).map(|n| row(0.1 * f64::from(n), 0.0, 0.0, 0.0)));
        assert!((l.phi(0, 3.0, 1.0, 0.0).unwrap() - 3.0).abs() < 1e-14);
        let l = ledger((0..11).map(|n| row(0.1 * f64::from(n), (f64::from(n)).sin().abs(), 0.0, 0.0)));
        let a = l.phi(1, 2.0, 0.75, 0.0).unwrap();
        let b = l.phi(1, 2.0, 0.35, 0.0).unwrap() + l.phi(1, 2.0, 0.75, 0.35).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_monotone_time() {
        let mut l = ledger([row(0.0, 0.0, 0.0, 0.0), row(0.5, 0.0, 0.0, 0.0)]);
        assert!(matches!(l.push_row(row(0.5, 0.0, 0.0, 0.0)), Err(Error::NonMonotoneTime { .. })));
        assert!(l.phi(0, 1.0, 0.7, 0.0).is_err());
    }

    #[test]
    fn constant_history_heat_functional() {
        let a = 1.7;
        let l = ledger((0..21).map(|n| row(0.05 * f64::from(n), 0.0, 0.0, a)));
        let (nu, q) = (0.1, 2);
        let c = 0.25 * nu * 16.0;
        let f = l.f_q_heat_functional(q, nu, 0.0, 1.0).unwrap();
        let exact = a * (1.0 - (-c * 1.0f64).exp()) / c;
        assert!((f.value - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn find_t0_on_constant_gradient() {
        let l = ledger((0..11).map(|n| row(0.1 * f64::from(n), 0.0, 2.0, 0.0)));
        assert!((l.tilde_l1_c0(0.2, 1.0).unwrap() - 1.6).abs() < 1e-14);
        assert_eq!(l.find_t0(10.0, 1.0).unwrap(), Some(0.0));
        let t0 = l.find_t0(0.65, 1.0).unwrap().unwrap();
        assert!((t0 - 0.7).abs() < 1e-12);
        assert!((l.t0_floor(1.0).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(l.find_t0(0.1, 1.0).unwrap(), None);
    }
}
