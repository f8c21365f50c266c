use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use smolflow::driver::{self, diagnostics, load_config, Snapshot};
use smolflow::monitor::{sample_row, EstimateParams, LedgerParams};

mod identity;

/// Coupled fluid / rod-orientation solver with Littlewood-Paley diagnostics.
///
/// The worker thread count follows `RAYON_NUM_THREADS`.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a configuration file.
    Run {
        config: PathBuf,
        /// Continue from this snapshot instead of the initial presets.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Validate a configuration file without running it.
    Check { config: PathBuf },
    /// Recompute the estimate report from a diagnostics file.
    Analyze {
        diagnostics: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        nu: f64,
    },
    /// Check the exact identities on synthetic fields and print a pass/fail table.
    IdentitySuite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the per-block spectrum of a snapshot.
    Spectrum {
        snapshot: PathBuf,
        /// Configuration the snapshot was written under (defaults otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write a plain-text dump of the collocation values here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, restart } => {
            let cfg = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            let mut sim = match restart {
                Some(path) => driver::Simulation::from_snapshot(cfg, &Snapshot::read(&path)?)?,
                None => driver::Simulation::new(cfg)?,
            };
            let summary = sim.run()?;
            log::info!("finished {} steps at t = {}", summary.steps, summary.t);
            if let Some(a) = summary.analysis {
                print!("{}", a.to_text());
            }
        }
        Command::Check { config } => {
            load_config(&config).with_context(|| format!("checking {}", config.display()))?;
            println!("{}: ok", config.display());
        }
        Command::Analyze { diagnostics: path, sigma, beta, lambda, s, p, nu } => {
            let ledger = diagnostics::read(&path, LedgerParams { nu, s, p })?;
            let a = driver::analyze(&ledger, EstimateParams { sigma, beta, lambda })?;
            print!("{}", a.to_text());
        }
        Command::IdentitySuite { seed } => {
            if !identity::run(seed)? {
                bail!("identity suite reported failures");
            }
        }
        Command::Spectrum { snapshot, config, dump } => {
            let snap = Snapshot::read(&snapshot)?;
            let mut cfg = match config {
                Some(c) => load_config(&c)?,
                None => driver::RunConfig::default(),
            };
            (cfg.grid.nx, cfg.grid.ny, cfg.grid.nm) = (snap.nx, snap.ny, snap.nm);
            let sim = driver::Simulation::from_snapshot(cfg, &snap)?;
            let m = &sim.config.monitor;
            let params = LedgerParams { nu: sim.config.physics.nu, s: m.s, p: m.p };
            let row = sample_row(&sim.system.model, &sim.state.v, &sim.state.f, sim.state.t, &params)?;
            println!("# t = {:?}, step = {}", snap.t, snap.step);
            print!("{}", diagnostics::spectrum_csv(&row));
            if let Some(d) = dump {
                std::fs::write(&d, snap.text_dump()).with_context(|| format!("writing {}", d.display()))?;
            }
        }
    }
    Ok(())
}
