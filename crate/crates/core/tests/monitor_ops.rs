mod common;

use std::f64::consts::PI;

use common::{model, phase_grid, random_density, random_velocity, rng};
use proptest::prelude::*;
use smolflow::coupled::{CoupledState, CoupledSystem};
use smolflow::fluid::{energy_budget, VelocityField};
use smolflow::kinetic::PhaseField;
use smolflow::lp::phi_profile;
use smolflow::monitor::{check_theorem, n_q_field, v_form, EstimateParams, LedgerParams, LedgerRow, RegularityLedger};

fn params() -> LedgerParams {
    LedgerParams { nu: 0.1, s: 2.0, p: f64::INFINITY }
}

/// Ledger of a short coupled run on a 16^2 x 16 grid; `xs` scales the spatial part of `f`.
fn recorded(v0: f64, xs: f64, steps: usize) -> RegularityLedger {
    let pg = phase_grid(16, 16);
    let sys = CoupledSystem::new(model(&pg, 1.0), 0.1).unwrap();
    let f = PhaseField::from_fn(&pg, |x, y, t| (1.0 + 0.5 * (2.0 * t).cos() + xs * x.cos() * y.cos() * (2.0 * t).sin()) / (2.0 * PI));
    let mut s = CoupledState { t: 0.0, step: 0, v: VelocityField::taylor_green(pg.grid(), v0), f };
    let mut ledger = RegularityLedger::new(params(), pg.grid().ladder().q_max());
    ledger.record_sample(&sys.model, &s.v, &s.f, 0.0).unwrap();
    for n in 1..=steps {
        s = sys.step(&s, 5e-3).unwrap();
        ledger.record_sample(&sys.model, &s.v, &s.f, n as f64 * 5e-3).unwrap();
    }
    ledger
}

#[test]
fn sample_matches_direct_norms() {
    let pg = phase_grid(32, 16);
    let m = model(&pg, 1.0);
    let v = VelocityField::taylor_green(pg.grid(), 1.0);
    let f = PhaseField::from_fn(&pg, |_, _, t| (1.0 + 0.5 * (2.0 * t).cos()) / (2.0 * PI));
    let mut ledger = RegularityLedger::new(params(), pg.grid().ladder().q_max());
    let row = ledger.record_sample(&m, &v, &f, 0.0).unwrap().clone();
    let eb = energy_budget(&v, &m.stress_tau(&f), 0.1);
    assert_eq!(row.energy, eb.energy);
    assert!((row.energy - PI * PI).abs() < 1e-12);
    assert!((row.mass - 4.0 * PI * PI).abs() < 1e-12);
    assert!((row.grad_v_inf - 2f64.sqrt()).abs() < 1e-13);
    // |k| = sqrt 2 lies in blocks 0 and 1; |v| peaks at 1
    for (i, q) in ledger.blocks().enumerate() {
        let want = if q >= 0 { phi_profile(2f64.sqrt() / f64::from(q).exp2()) } else { 0.0 };
        assert!((row.dv[i] - want).abs() < 1e-13, "q {q}: {} vs {want}", row.dv[i]);
    }
    // H^{1/2}: sum |v_k|^2 sqrt(1 + |k|^2) over the box, times the area
    assert!((row.h_half - (2.0 * PI * PI * 3f64.sqrt()).sqrt()).abs() < 1e-12);
}

#[test]
fn nq_of_separable_density() {
    // f = (1 + a cos x cos 2 theta) / 2 pi: block 0 carries the x-mode with weight phi(1)
    let a = 0.3;
    let pg = phase_grid(16, 16);
    let f = PhaseField::from_fn(&pg, |x, _, t| (1.0 + a * x.cos() * (2.0 * t).cos()) / (2.0 * PI));
    let s = 2.0;
    let g = pg.grid();
    let n_low = n_q_field(&f, -1, s).unwrap();
    let n0 = n_q_field(&f, 0, s).unwrap();
    let n1 = n_q_field(&f, 1, s).unwrap();
    let h2 = 5f64.powf(-s / 2.0);
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let m = i * g.ny() + j;
            assert!((n_low.values()[m] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
            let want = phi_profile(1.0) * a * g.x(i).cos().abs() * h2 * PI.sqrt() / (2.0 * PI);
            assert!((n0.values()[m] - want).abs() < 1e-14);
            assert!(n1.values()[m].abs() < 1e-14);
        }
    }
}

#[test]
fn v_form_vanishes_on_zero_inputs() {
    let pg = phase_grid(16, 16);
    let m = model(&pg, 1.0);
    let mut r = rng(8);
    let f = random_density(&pg, 4, &mut r);
    let zero_v = VelocityField::zeros(pg.grid());
    let zero_f = PhaseField::zeros(&pg);
    let a = v_form(&m, &zero_v, &zero_f, &f, 2.0).unwrap();
    assert!(a.values.values().iter().all(|&x| x == 0.0));
    let v = random_velocity(pg.grid(), 4, &mut r);
    let b = v_form(&m, &v, &f, &zero_f, 2.0).unwrap();
    assert!(b.values.values().iter().all(|&x| x == 0.0));
}

#[test]
fn zero_velocity_run_is_degenerate() {
    let ledger = recorded(0.0, 0.0, 10);
    let p = EstimateParams { sigma: 0.4, beta: 0.2, lambda: 5.0 };
    let t1 = ledger.rows().last().unwrap().t;
    assert_eq!(ledger.tilde_l1_c0(0.0, t1).unwrap(), 0.0);
    assert_eq!(ledger.find_t0(1e-6, t1).unwrap(), Some(0.0));
    let r = check_theorem(&ledger, p, 0.0, t1).unwrap();
    assert!(r.hypotheses_hold && r.degenerate && r.conclusion_holds);
    assert_eq!(r.c_fit, 0.0);
}

#[test]
fn empty_data_gives_zero_functionals() {
    let pg = phase_grid(16, 16);
    let m = model(&pg, 1.0);
    let (v, f) = (VelocityField::zeros(pg.grid()), PhaseField::zeros(&pg));
    let mut ledger = RegularityLedger::new(params(), pg.grid().ladder().q_max());
    ledger.record_sample(&m, &v, &f, 0.0).unwrap();
    ledger.record_sample(&m, &v, &f, 0.1).unwrap();
    let r = check_theorem(&ledger, EstimateParams { sigma: 0.4, beta: 0.2, lambda: 10.0 }, 0.0, 0.1).unwrap();
    assert_eq!((r.m_sigma_f, r.m_sigma1_v, r.f0_norm, r.c_fit), (0.0, 0.0, 0.0, 0.0));
    assert!(r.conclusion_holds);
    assert_eq!(ledger.f_q_heat_functional(2, 0.1, 0.0, 0.1).unwrap().value, 0.0);
}

#[test]
fn phi_gap_between_blocks_is_bounded() {
    let ledger = recorded(1.0, 0.3, 20);
    let t1 = ledger.rows().last().unwrap().t;
    let x = ledger.tilde_l1_c0(0.0, t1).unwrap();
    let lambda = 3.0;
    for &t in &ledger.times() {
        for q in ledger.blocks() {
            for qq in ledger.blocks() {
                let gap = (ledger.phi(q, lambda, t, 0.0).unwrap() - ledger.phi(qq, lambda, t, 0.0).unwrap()).abs();
                assert!(gap <= lambda * x * f64::from((q - qq).abs()) * (1.0 + 1e-12) + 1e-14);
            }
        }
    }
}

#[test]
fn heat_functional_decreases_in_q() {
    let ledger = recorded(1.0, 0.3, 20);
    let t1 = ledger.rows().last().unwrap().t;
    let vals: Vec<f64> = (0..=ledger.q_max()).map(|q| ledger.f_q_heat_functional(q, 0.1, 0.0, t1).unwrap().value).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{vals:?}");
}

#[test]
fn functionals_are_nonincreasing_in_lambda() {
    let ledger = recorded(1.0, 0.3, 20);
    let lams = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0];
    let mf: Vec<f64> = lams.iter().map(|&l| ledger.m_sigma_lambda_f(0.4, l).unwrap()).collect();
    let mv: Vec<f64> = lams.iter().map(|&l| ledger.m_sigma_lambda_v(1.4, l).unwrap()).collect();
    assert!(mf.windows(2).all(|w| w[1] <= w[0]));
    assert!(mv.windows(2).all(|w| w[1] <= w[0]));
}

fn synthetic(rows: &[(f64, Vec<f64>)], q_max: i32) -> RegularityLedger {
    let mut l = RegularityLedger::new(params(), q_max);
    let nb = (q_max + 2) as usize;
    for (t, s) in rows {
        l.push_row(LedgerRow {
            t: *t,
            energy: 0.0,
            dissipation: 0.0,
            stress_power: 0.0,
            mass: 0.0,
            min_f: 0.0,
            grad_v_inf: 0.0,
            h_half: 1.0,
            dgv: s.clone(),
            sgv: s.clone(),
            dv: vec![1.0; nb],
            nq: s.clone(),
        })
        .unwrap();
    }
    l
}

fn ledger_strategy() -> impl Strategy<Value = RegularityLedger> {
    (2usize..12)
        .prop_flat_map(|n| (prop::collection::vec(0.01f64..0.5, n), prop::collection::vec(prop::collection::vec(0.0f64..5.0, 4), n)))
        .prop_map(|(gaps, vals)| {
            let mut t = 0.0;
            let rows: Vec<(f64, Vec<f64>)> = gaps
                .iter()
                .zip(vals)
                .map(|(g, v)| {
                    let r = (t, v);
                    t += g;
                    r
                })
                .collect();
            synthetic(&rows, 2)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_lower_bound_and_additivity(l in ledger_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, lambda in 0.0f64..20.0) {
        let t = l.times();
        let (t0, t1) = (t[0], t[t.len() - 1]);
        let mut pts = [a, b, c].map(|u| t0 + u * (t1 - t0));
        pts.sort_by(f64::total_cmp);
        let [p0, p1, p2] = pts;
        for q in l.blocks() {
            let whole = l.phi(q, lambda, p2, p0).unwrap();
            let parts = l.phi(q, lambda, p2, p1).unwrap() + l.phi(q, lambda, p1, p0).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + whole.abs()));
            prop_assert!(whole >= lambda * (p2 - p0) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn m_sigma_monotone_in_lambda(l in ledger_strategy(), l1 in 0.0f64..10.0, dl in 0.0f64..10.0) {
        prop_assert!(l.m_sigma_lambda_f(0.4, l1 + dl).unwrap() <= l.m_sigma_lambda_f(0.4, l1).unwrap());
        prop_assert!(l.m_sigma_lambda_v(1.4, l1 + dl).unwrap() <= l.m_sigma_lambda_v(1.4, l1).unwrap());
    }

    #[test]
    fn t0_search_is_monotone(l in ledger_strategy(), e1 in 0.01f64..10.0, de in 0.0f64..10.0) {
        let t1 = *l.times().last().unwrap();
        let a = l.find_t0(e1, t1).unwrap();
        let b = l.find_t0(e1 + de, t1).unwrap();
        if let Some(ta) = a {
            prop_assert!(l.tilde_l1_c0(ta, t1).unwrap() <= e1);
            prop_assert!(b.is_some_and(|tb| tb <= ta));
        }
    }
}
