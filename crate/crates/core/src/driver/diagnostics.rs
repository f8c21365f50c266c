//! Diagnostics CSV: one row per ledger sample.
//!
//! Columns, in order: `t, E, D, S, mass, min_f, grad_v_inf, h_half`, then for
//! each quantity `dgv, sgv, dv, nq, phi` one column per block (`_qm1`, `_q0`,
//! ... up to the top block), then the running `m_sigma_f, m_sigma1_v,
//! tilde_l1_c0`. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lp::LOW_BLOCK;
use crate::monitor::{q_label, LedgerParams, LedgerRow, RegularityLedger};

const GLOBAL: [&str; 8] = ["t", "E", "D", "S", "mass", "min_f", "grad_v_inf", "h_half"];
const PER_Q: [&str; 5] = ["dgv", "sgv", "dv", "nq", "phi"];
const RUNNING: [&str; 3] = ["m_sigma_f", "m_sigma1_v", "tilde_l1_c0"];

pub fn header(q_max: i32) -> Vec<String> {
    let mut h: Vec<String> = GLOBAL.iter().map(|s| s.to_string()).collect();
    for name in PER_Q {
        for q in LOW_BLOCK..=q_max {
            h.push(format!("{name}_q{}", q_label(q)));
        }
    }
    h.extend(RUNNING.iter().map(|s| s.to_string()));
    h
}

/// Render the ledger as CSV; `sigma` and `lambda` set the weighted columns.
pub fn render(ledger: &RegularityLedger, sigma: f64, lambda: f64) -> Result<String> {
    let mut s = header(ledger.q_max()).join(",");
    s.push('\n');
    let running = ledger.running(sigma, lambda);
    let t_first = ledger.rows().first().map_or(0.0, |r| r.t);
    for (r, run) in ledger.rows().iter().zip(&running) {
        let mut cells: Vec<f64> = vec![r.t, r.energy, r.dissipation, r.stress_power, r.mass, r.min_f, r.grad_v_inf, r.h_half];
        for col in [&r.dgv, &r.sgv, &r.dv, &r.nq] {
            cells.extend_from_slice(col);
        }
        for q in ledger.blocks() {
            cells.push(ledger.phi(q, lambda, r.t, t_first)?);
        }
        cells.extend_from_slice(run);
        let line = cells.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "{line}");
    }
    Ok(s)
}

pub fn write(ledger: &RegularityLedger, sigma: f64, lambda: f64, path: &Path) -> Result<()> {
    std::fs::write(path, render(ledger, sigma, lambda)?)?;
    Ok(())
}

fn parse_f64(cell: &str, line: usize) -> Result<f64> {
    match cell.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        c => c.parse().map_err(|_| Error::Parse(format!("line {line}: '{c}' is not a number"))),
    }
}

/// Rebuild a ledger from a diagnostics file. Derived columns are ignored.
pub fn parse(text: &str, params: LedgerParams) -> Result<RegularityLedger> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| Error::Parse("empty diagnostics file".into()))?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    let n_per_q = cols.iter().filter(|c| c.starts_with("dgv_q")).count();
    if n_per_q == 0 {
        return Err(Error::Parse("header has no per-block columns".into()));
    }
    let q_max = LOW_BLOCK + n_per_q as i32 - 1;
    let expected = header(q_max);
    if cols != expected {
        return Err(Error::Parse(format!("unexpected header; expected {}", expected.join(","))));
    }
    let nb = n_per_q;
    let mut ledger = RegularityLedger::new(params, q_max);
    for (ln, line) in lines {
        let v = line.split(',').map(|c| parse_f64(c, ln + 1)).collect::<Result<Vec<f64>>>()?;
        if v.len() != cols.len() {
            return Err(Error::Parse(format!("line {}: {} cells, expected {}", ln + 1, v.len(), cols.len())));
        }
        let block = |k: usize| v[8 + k * nb..8 + (k + 1) * nb].to_vec();
        ledger.push_row(LedgerRow {
            t: v[0],
            energy: v[1],
            dissipation: v[2],
            stress_power: v[3],
            mass: v[4],
            min_f: v[5],
            grad_v_inf: v[6],
            h_half: v[7],
            dgv: block(0),
            sgv: block(1),
            dv: block(2),
            nq: block(3),
        })?;
    }
    Ok(ledger)
}

pub fn read(path: &Path, params: LedgerParams) -> Result<RegularityLedger> {
    parse(&std::fs::read_to_string(path)?, params)
}

/// Per-block spectrum of one sample: `q, dv, dgv, sgv, nq`.
pub fn spectrum_csv(row: &LedgerRow) -> String {
    let mut s = String::from("q,dv,dgv,sgv,nq\n");
    for (i, q) in (LOW_BLOCK..).take(row.dv.len()).enumerate() {
        let _ = writeln!(s, "{q},{:?},{:?},{:?},{:?}", row.dv[i], row.dgv[i], row.sgv[i], row.nq[i]);
    }
    s
}
