//! Hypothesis and conclusion arithmetic of the deteriorating-regularity estimate.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::monitor::ledger::RegularityLedger;

/// Parameters of one estimate check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateParams {
    pub sigma: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl EstimateParams {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.beta > 0.0) {
            errs.push(format!("beta: must be positive, got {}", self.beta));
        }
        if !(self.sigma > 0.0) {
            errs.push(format!("sigma: must be positive, got {}", self.sigma));
        }
        if !(self.sigma + self.beta < 1.0) {
            errs.push(format!("sigma + beta: must be below 1, got {}", self.sigma + self.beta));
        }
        if !(self.lambda > 0.0) {
            errs.push(format!("lambda: must be positive, got {}", self.lambda));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Largest `||grad v||` over a window for which both hypotheses hold.
    pub fn epsilon(&self) -> f64 {
        (self.sigma - self.beta).min(1.0 - self.sigma - self.beta) / self.lambda
    }
}

/// Outcome of checking the estimate on a window `[t0, t1]` of a recorded run.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub sigma: f64,
    pub beta: f64,
    pub lambda: f64,
    pub s: f64,
    pub p: f64,
    pub t0: f64,
    pub t1: f64,
    pub m_sigma_f: f64,
    pub m_sigma1_v: f64,
    pub tilde_l1_c0: f64,
    /// `sup_q 2^{q sigma} ||N_q(t0)||_{L^p}`
    pub f0_norm: f64,
    /// `sigma - lambda X - beta`
    pub lower_margin: f64,
    /// `1 - beta - sigma - lambda X`
    pub upper_margin: f64,
    pub hypotheses_hold: bool,
    pub c_fit: f64,
    /// `M^{sigma+1}(v) = 0`: the conclusion does not involve the constant.
    pub degenerate: bool,
    pub conclusion_holds: bool,
    /// Per block: `3 ||f0|| + (3 C_fit / lambda) M^{sigma+1}(v) - sup_t 2^{q sigma - Phi} ||N_q||`.
    pub slack: Vec<(i32, f64)>,
}

/// Evaluate the estimate on `[t0, t1]` with weights measured from `t0`.
pub fn check_theorem(ledger: &RegularityLedger, params: EstimateParams, t0: f64, t1: f64) -> Result<EstimateReport> {
    params.validate()?;
    let EstimateParams { sigma, beta, lambda } = params;
    let x = ledger.tilde_l1_c0(t0, t1)?;
    let m_f = ledger.m_sigma_lambda_f_on(sigma, lambda, t0, t1)?;
    let m_v = ledger.m_sigma_lambda_v_on(sigma + 1.0, lambda, t0, t1)?;
    let start = ledger
        .rows()
        .iter()
        .find(|r| (r.t - t0).abs() <= 1e-12 * (1.0 + t0.abs()))
        .ok_or_else(|| Error::Range(format!("window start {t0} is not a sample time")))?;
    let f0_norm = ledger.blocks().zip(&start.nq).map(|(q, &n)| (f64::from(q) * sigma).exp2() * n).fold(0.0, f64::max);

    let lower_margin = sigma - lambda * x - beta;
    let upper_margin = 1.0 - beta - sigma - lambda * x;
    let excess = (m_f - 3.0 * f0_norm).max(0.0);
    let degenerate = m_v == 0.0;
    let c_fit = if degenerate {
        if excess == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lambda * excess / (3.0 * m_v)
    };
    let bound = 3.0 * f0_norm + if degenerate { 0.0 } else { 3.0 * c_fit / lambda * m_v };
    let mut slack = Vec::new();
    for q in ledger.blocks() {
        let i = (q - ledger.blocks().start()) as usize;
        let mut best = 0.0f64;
        for r in ledger.rows().iter().filter(|r| r.t >= t0 - 1e-12 && r.t <= t1 + 1e-12) {
            let phi = ledger.phi(q, lambda, r.t.max(t0), t0)?;
            best = best.max((f64::from(q) * sigma - phi).exp2() * r.nq[i]);
        }
        slack.push((q, bound - best));
    }
    Ok(EstimateReport {
        sigma,
        beta,
        lambda,
        s: ledger.params().s,
        p: ledger.params().p,
        t0,
        t1,
        m_sigma_f: m_f,
        m_sigma1_v: m_v,
        tilde_l1_c0: x,
        f0_norm,
        lower_margin,
        upper_margin,
        hypotheses_hold: lower_margin >= 0.0 && upper_margin >= 0.0,
        c_fit,
        degenerate,
        conclusion_holds: c_fit.is_finite() && m_f <= bound * (1.0 + 1e-12),
        slack,
    })
}

impl EstimateReport {
    /// `key = value` lines, floats in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("sigma", format!("{:?}", self.sigma));
        kv("beta", format!("{:?}", self.beta));
        kv("lambda", format!("{:?}", self.lambda));
        kv("s", format!("{:?}", self.s));
        kv("p", format!("{:?}", self.p));
        kv("t0", format!("{:?}", self.t0));
        kv("t1", format!("{:?}", self.t1));
        kv("m_sigma_f", format!("{:?}", self.m_sigma_f));
        kv("m_sigma1_v", format!("{:?}", self.m_sigma1_v));
        kv("tilde_l1_c0", format!("{:?}", self.tilde_l1_c0));
        kv("f0_norm", format!("{:?}", self.f0_norm));
        kv("lower_margin", format!("{:?}", self.lower_margin));
        kv("upper_margin", format!("{:?}", self.upper_margin));
        kv("hypotheses_hold", self.hypotheses_hold.to_string());
        kv("c_fit", format!("{:?}", self.c_fit));
        kv("degenerate", self.degenerate.to_string());
        kv("conclusion_holds", self.conclusion_holds.to_string());
        for (q, v) in &self.slack {
            kv(&format!("slack_q{}", q_label(*q)), format!("{v:?}"));
        }
        s
    }
}

/// Column suffix for block `q`: `m1` for `-1`, the number otherwise.
pub fn q_label(q: i32) -> String {
    if q < 0 {
        format!("m{}", -q)
    } else {
        q.to_string()
    }
}
