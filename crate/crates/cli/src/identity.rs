//! Exact identities checked on synthetic band-limited fields.

use std::f64::consts::PI;
use std::sync::Arc;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smolflow::coupled::{CoupledState, CoupledSystem};
use smolflow::fiber::{FiberGrid, KernelSpec};
use smolflow::fluid::{leray_project, VelocityField};
use smolflow::kinetic::{PhaseField, PhaseGrid, Smoluchowski};
use smolflow::lp::{BonySplit, Grid2D, GridSpec2D, SpectralField2D};
use smolflow::monitor::{n_q_field, RestDecomposer};

fn random_field(g: &Arc<Grid2D<f64>>, rng: &mut ChaCha8Rng) -> SpectralField2D<f64> {
    let n = g.len();
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut f = SpectralField2D::from_physical(g, &values).expect("grid length");
    f.dealias();
    f
}

fn random_density(pg: &Arc<PhaseGrid<f64>>, rng: &mut ChaCha8Rng) -> PhaseField<f64> {
    let values: Vec<f64> = (0..pg.len()).map(|_| (1.0 + 0.2 * rng.gen_range(-1.0..1.0)) / (2.0 * PI)).collect();
    PhaseField::from_values(pg, &values).expect("phase length")
}

struct Table {
    ok: bool,
}

impl Table {
    fn row(&mut self, name: &str, value: f64, tol: f64) {
        let pass = value <= tol;
        self.ok &= pass;
        println!("{:<44} {:>12.3e} {:>10.1e}  {}", name, value, tol, if pass { "PASS" } else { "FAIL" });
    }
}

/// Print the table; returns whether every identity held.
pub fn run(seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid2D::new(GridSpec2D::new(32, 32)?)?;
    let fiber = FiberGrid::new(16, 2.0 / 3.0)?;
    let pg = PhaseGrid::new(&grid, &fiber);
    let model = Smoluchowski::rigid_rod(&pg, KernelSpec::maier_saupe(1.0), 1.0);
    let mut t = Table { ok: true };
    println!("{:<44} {:>12} {:>10}  result", "identity", "value", "tol");

    let ladder = grid.ladder();
    t.row("partition of unity", ladder.partition_residual(), 1e-12);
    t.row("block support overlap", ladder.overlap_residual(), 1e-12);

    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (u, v) = (random_field(&grid, &mut rng), random_field(&grid, &mut rng));
        let split = BonySplit::compute(&u, &v)?;
        worst = worst.max(split.residual_l2() / split.product.l2_norm_sq().sqrt());
    }
    t.row("paraproduct split uv = T_u v + T_v u + R", worst, 1e-10);

    let w = [random_field(&grid, &mut rng), random_field(&grid, &mut rng)];
    let p = leray_project(&w)?;
    let pp = leray_project(&p.u.clone())?;
    t.row("Leray projection idempotent", pp.minus(&p)?.max_abs_coeff(), 1e-14);
    t.row("Leray projection divergence", p.max_divergence_coeff(), 1e-12);

    let v = VelocityField::from_stream(&random_field(&grid, &mut rng));
    let f = random_density(&pg, &mut rng);
    let dec = RestDecomposer::new(&model, &v, &f)?;
    let (mut tr, mut dr) = (0.0f64, 0.0f64);
    for q in ladder.blocks() {
        let r = dec.at(q);
        tr = tr.max(r.transport_relative);
        dr = dr.max(r.drift_relative);
    }
    t.row("transport rest terms telescope", tr, 1e-8);
    t.row("drift rest terms telescope", dr, 1e-8);

    let mut fub = 0.0f64;
    for q in ladder.blocks() {
        let nq = n_q_field(&f, q, 2.0)?;
        let lhs = nq.lebesgue_norm(2.0);
        let h = pg.fiber().smoothing_weights(2.0)?;
        let w = ladder.block_weights(q).expect("block");
        let g = f.apply_x(w).apply_theta(&h);
        fub = fub.max((lhs - g.l2_norm()).abs() / g.l2_norm().max(1e-300));
    }
    t.row("N_q Fubini identity", fub, 1e-12);

    let sys = CoupledSystem::new(model, 0.1)?;
    let s0 = CoupledState { t: 0.0, step: 0, v: v.scaled(0.1), f };
    let s1 = sys.step(&s0, 1e-3)?;
    t.row("mass conservation over one step", (s1.f.mass() - s0.f.mass()).abs() / s0.f.mass(), 1e-12);
    t.row("divergence after one step", s1.v.max_divergence_coeff(), 1e-12);

    Ok(t.ok)
}
