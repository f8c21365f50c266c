//! The coupled time-stepping loop and its outputs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::coupled::{CoupledState, CoupledSystem};
use crate::driver::config::RunConfig;
use crate::driver::diagnostics;
use crate::driver::snapshot::Snapshot;
use crate::error::{Error, Result};
use crate::fiber::{FiberGrid, KernelSpec};
use crate::fluid::VelocityField;
use crate::kinetic::{PhaseField, PhaseGrid, Smoluchowski};
use crate::lp::{Grid2D, GridSpec2D};
use crate::monitor::{check_theorem, sample_row, EstimateParams, EstimateReport, LedgerParams, RegularityLedger};

/// Final estimate check on the window selected by the gradient-norm search.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    /// Window bound handed to the search: `min(sigma - beta, 1 - sigma - beta) / lambda`.
    pub epsilon: f64,
    /// Smallest bound the search can satisfy on this record.
    pub floor: f64,
    /// Window start found by the search, if any.
    pub t0_found: Option<f64>,
    /// The check on `[t0_found, T]`, or on the whole record when the search fails.
    pub report: EstimateReport,
}

impl Analysis {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "t0_floor = {:?}", self.floor);
        match self.t0_found {
            Some(t) => {
                let _ = writeln!(s, "t0_found = {t:?}");
            }
            None => s.push_str("t0_found = none\n"),
        }
        s + &self.report.to_text()
    }
}

/// Offline and online evaluation of the estimate on a recorded ledger.
pub fn analyze(ledger: &RegularityLedger, params: EstimateParams) -> Result<Analysis> {
    params.validate()?;
    if ledger.len() < 2 {
        return Err(Error::Range("need at least two samples".into()));
    }
    let rows = ledger.rows();
    let (t_first, t_last) = (rows[0].t, rows[rows.len() - 1].t);
    let epsilon = params.epsilon();
    let floor = ledger.t0_floor(t_last)?;
    let t0_found = if epsilon > 0.0 { ledger.find_t0(epsilon, t_last)? } else { None };
    let report = check_theorem(ledger, params, t0_found.unwrap_or(t_first), t_last)?;
    Ok(Analysis { epsilon, floor, t0_found, report })
}

/// Outcome of [`Simulation::run`].
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub steps: u64,
    pub t: f64,
    pub analysis: Option<Analysis>,
}

/// Grids, model, state and ledger of one run.
pub struct Simulation {
    pub config: RunConfig,
    pub pg: Arc<PhaseGrid<f64>>,
    pub system: CoupledSystem<f64>,
    pub state: CoupledState<f64>,
    pub ledger: RegularityLedger,
    hash: [u8; 32],
}

/// Build the phase grid described by a configuration.
pub fn phase_grid(config: &RunConfig) -> Result<Arc<PhaseGrid<f64>>> {
    let g = &config.grid;
    let spec = GridSpec2D::new(g.nx, g.ny)?.with_dealias(g.dealias_fraction)?;
    let grid = Grid2D::new(spec)?;
    let fiber = FiberGrid::new(g.nm, g.dealias_fraction)?;
    Ok(PhaseGrid::new(&grid, &fiber))
}

/// Initial velocity and density from the configured presets.
pub fn initial_state(config: &RunConfig, pg: &Arc<PhaseGrid<f64>>) -> Result<CoupledState<f64>> {
    let ic = &config.initial;
    let grid = pg.grid();
    let v = match ic.velocity.as_str() {
        "taylor-green" => VelocityField::taylor_green(grid, ic.amplitude),
        "zero" => VelocityField::zeros(grid),
        other => return Err(Error::Config(vec![format!("initial.velocity: unknown preset '{other}'")])),
    };
    let f = match ic.density.as_str() {
        "isotropic" => PhaseField::from_fn(pg, |_, _, _| 1.0 / (2.0 * PI)),
        "zero" => PhaseField::zeros(pg),
        "anisotropic" => {
            let (a, c) = (ic.a, ic.c);
            PhaseField::from_fn(pg, move |x, y, t| (1.0 + a * (2.0 * t).cos() + c * x.cos() * y.cos() * (2.0 * t).sin()) / (2.0 * PI))
        }
        "von-mises" => {
            let (k, t0) = (ic.kappa, ic.theta0);
            let fiber = pg.fiber();
            let z = (0..fiber.nm()).map(|j| (k * (fiber.theta(j) - t0).cos()).exp()).sum::<f64>() * fiber.spacing();
            PhaseField::from_fn(pg, move |_, _, t| (k * (t - t0).cos()).exp() / z)
        }
        other => return Err(Error::Config(vec![format!("initial.density: unknown preset '{other}'")])),
    };
    Ok(CoupledState { t: 0.0, step: 0, v, f })
}

fn ledger_params(config: &RunConfig) -> LedgerParams {
    LedgerParams { nu: config.physics.nu, s: config.monitor.s, p: config.monitor.p }
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let pg = phase_grid(&config)?;
        let state = initial_state(&config, &pg)?;
        Self::with_state(config, pg, state)
    }

    /// Continue from a snapshot written by an earlier run.
    pub fn from_snapshot(config: RunConfig, snap: &Snapshot) -> Result<Self> {
        config.validate()?;
        let pg = phase_grid(&config)?;
        let state = snap.to_state(&pg)?;
        let sim = Self::with_state(config, pg, state)?;
        if snap.config_hash != sim.hash {
            log::warn!("snapshot was written under a different configuration");
        }
        Ok(sim)
    }

    fn with_state(config: RunConfig, pg: Arc<PhaseGrid<f64>>, state: CoupledState<f64>) -> Result<Self> {
        let p = &config.physics;
        let kernel = KernelSpec::by_name(&p.kernel, p.b)?;
        let mut model = Smoluchowski::rigid_rod(&pg, kernel, config.b2());
        model.diffusivity = p.diffusivity;
        model.cfl_safety = config.time.cfl_safety;
        let system = CoupledSystem::new(model, p.nu)?;
        let ledger = RegularityLedger::new(ledger_params(&config), pg.grid().ladder().q_max());
        let hash = config.hash();
        Ok(Self { config, pg, system, state, ledger, hash })
    }

    /// Number of steps of size `dt` that reach `t_end`.
    pub fn target_steps(&self) -> u64 {
        let t = &self.config.time;
        (t.t_end / t.dt - 1e-9).ceil().max(0.0) as u64
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::from_state(&self.state, self.hash)
    }

    pub fn record(&mut self) -> Result<()> {
        if self.config.monitor.enabled {
            let (v, f, t) = (&self.state.v, &self.state.f, self.state.t);
            self.ledger.record_sample(&self.system.model, v, f, t)?;
        }
        Ok(())
    }

    /// Advance one step, enforcing the positivity floor.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.config.time.dt;
        let mut next = self.system.step(&self.state, dt)?;
        next.t = next.step as f64 * dt;
        let min = next.f.min_value();
        let floor = self.config.time.positivity_floor;
        if min < floor {
            return Err(Error::Positivity { min, floor, t: next.t });
        }
        log::trace!("step {} t = {} min f = {min}", next.step, next.t);
        self.state = next;
        Ok(())
    }

    fn out_dir(&self) -> Option<&Path> {
        self.config.output.dir.as_deref()
    }

    fn out(&self, name: &str) -> Option<PathBuf> {
        self.out_dir().map(|d| d.join(name))
    }

    fn write_snapshot(&self, name: &str) -> Result<()> {
        if let Some(path) = self.out(name) {
            self.snapshot().write(&path)?;
            if self.config.monitor.enabled {
                let row = sample_row(&self.system.model, &self.state.v, &self.state.f, self.state.t, &ledger_params(&self.config))?;
                let spec = self.out(&format!("spectrum_{:08}.csv", self.state.step)).expect("dir");
                std::fs::write(spec, diagnostics::spectrum_csv(&row))?;
            }
        }
        Ok(())
    }

    fn write_diagnostics(&self) -> Result<()> {
        if let (Some(path), false) = (self.out("diagnostics.csv"), self.ledger.is_empty()) {
            diagnostics::write(&self.ledger, self.config.monitor.sigma, self.config.monitor.lambda, &path)?;
        }
        Ok(())
    }

    fn estimate_params(&self) -> EstimateParams {
        let m = &self.config.monitor;
        EstimateParams { sigma: m.sigma, beta: m.beta, lambda: m.lambda }
    }

    /// Run to `t_end`, sampling, writing outputs and the final estimate check.
    pub fn run(&mut self) -> Result<RunSummary> {
        if let Some(d) = self.out_dir() {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join("config.toml"), self.config.to_toml())?;
        }
        let n = self.target_steps();
        let every = self.config.monitor.sample_every;
        let snap_every = self.config.output.snapshot_every;
        if self.ledger.is_empty() {
            self.record()?;
        }
        while self.state.step < n {
            if let Err(e) = self.step() {
                log::error!("aborting at step {}: {e}", self.state.step);
                self.write_snapshot("abort.snap")?;
                self.write_diagnostics()?;
                return Err(e);
            }
            let s = self.state.step;
            if s.is_multiple_of(every) || s == n {
                self.record()?;
            }
            if snap_every > 0 && s.is_multiple_of(snap_every) && s != n {
                self.write_snapshot(&format!("snap_{s:08}.snap"))?;
            }
        }
        self.write_snapshot("final.snap")?;
        self.write_diagnostics()?;
        let analysis = if self.config.monitor.enabled && self.ledger.len() >= 2 { Some(analyze(&self.ledger, self.estimate_params())?) } else { None };
        if let (Some(a), Some(path)) = (&analysis, self.out("report.txt")) {
            std::fs::write(path, a.to_text())?;
        }
        Ok(RunSummary { steps: self.state.step, t: self.state.t, analysis })
    }
}

/// Build and run a simulation from its configuration.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    Simulation::new(config.clone())?.run()
}
