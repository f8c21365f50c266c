#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smolflow::fiber::{FiberGrid, KernelSpec};
use smolflow::fluid::VelocityField;
use smolflow::kinetic::{PhaseField, PhaseGrid, Smoluchowski};
use smolflow::lp::{Grid2D, GridSpec2D, SpectralField2D};
use smolflow::Complex;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(nx: usize, ny: usize) -> Arc<Grid2D<f64>> {
    Grid2D::new(GridSpec2D::new(nx, ny).unwrap()).unwrap()
}

pub fn phase_grid(n: usize, nm: usize) -> Arc<PhaseGrid<f64>> {
    PhaseGrid::new(&grid(n, n), &FiberGrid::new(nm, 2.0 / 3.0).unwrap())
}

pub fn model(pg: &Arc<PhaseGrid<f64>>, b: f64) -> Smoluchowski<f64> {
    Smoluchowski::rigid_rod(pg, KernelSpec::maier_saupe(b), b)
}

/// Real random field with modes `0 < |k|_inf <= band`, amplitudes decaying like `|k|^-decay`.
pub fn random_field(g: &Arc<Grid2D<f64>>, band: i64, decay: f64, rng: &mut impl Rng) -> SpectralField2D<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let mut values = vec![0.0; nx * ny];
    for kx in -band..=band {
        for ky in 0..=band {
            if ky == 0 && kx <= 0 {
                continue;
            }
            let k = ((kx * kx + ky * ky) as f64).sqrt();
            let amp = rng.gen_range(-1.0..1.0) * k.powf(-decay);
            let ph = rng.gen_range(0.0..2.0 * PI);
            for i in 0..nx {
                for j in 0..ny {
                    let (x, y) = (g.x(i), g.y(j));
                    values[i * ny + j] += amp * ((kx as f64) * x + (ky as f64) * y + ph).cos();
                }
            }
        }
    }
    let mut f = SpectralField2D::from_physical(g, &values).unwrap();
    f.dealias();
    f
}

pub fn random_velocity(g: &Arc<Grid2D<f64>>, band: i64, rng: &mut impl Rng) -> VelocityField<f64> {
    VelocityField::from_stream(&random_field(g, band, 2.0, rng))
}

/// Positive random density: a constant plus small random x and theta modes.
pub fn random_density(pg: &Arc<PhaseGrid<f64>>, band: i64, rng: &mut impl Rng) -> PhaseField<f64> {
    let g = pg.grid();
    let modes: Vec<(f64, SpectralField2D<f64>)> = (0..=3).map(|m| (m as f64, random_field(g, band, 1.5, rng).scaled(0.05))).collect();
    let phys: Vec<Vec<f64>> = modes.iter().map(|(_, f)| f.to_physical()).collect();
    let phases: Vec<f64> = (0..=3).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let nxy = g.len();
    let values: Vec<f64> = (0..pg.len())
        .map(|i| {
            let th = pg.fiber().theta(i / nxy);
            let m = i % nxy;
            let mut s = 1.0;
            for (k, (mm, _)) in modes.iter().enumerate() {
                s += phys[k][m] * (mm * th + phases[k]).cos() + if k > 0 { 0.1 * (mm * th).sin() / mm } else { 0.0 };
            }
            s / (2.0 * PI)
        })
        .collect();
    PhaseField::from_values(pg, &values).unwrap()
}

pub fn max_abs(c: &[Complex<f64>]) -> f64 {
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
