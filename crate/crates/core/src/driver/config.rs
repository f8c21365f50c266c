//! Run configuration: a sectioned TOML file with documented defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lp::GridSpec2D;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub nm: usize,
    pub dealias_fraction: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nx: 64, ny: 64, nm: 32, dealias_fraction: GridSpec2D::DEFAULT_DEALIAS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub nu: f64,
    /// `maier-saupe` or `none`.
    pub kernel: String,
    /// Kernel intensity.
    pub b: f64,
    /// Intensity of the quadratic stress; defaults to `b`.
    pub b2: Option<f64>,
    /// Fiber diffusion coefficient.
    pub diffusivity: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self { nu: 0.1, kernel: "maier-saupe".into(), b: 1.0, b2: None, diffusivity: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    pub enabled: bool,
    pub s: f64,
    pub sigma: f64,
    pub beta: f64,
    pub lambda: f64,
    /// Lebesgue exponent of the block norms; `inf` is allowed.
    pub p: f64,
    /// Steps between ledger samples.
    pub sample_every: u64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self { enabled: true, s: 2.0, sigma: 0.4, beta: 0.2, lambda: 10.0, p: f64::INFINITY, sample_every: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    /// A run aborts when `min f` drops below this value.
    pub positivity_floor: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 0.5, cfl_safety: 0.5, positivity_floor: -0.05 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; nothing is written when absent.
    pub dir: Option<PathBuf>,
    /// Steps between snapshots (0: final state only).
    pub snapshot_every: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    /// `taylor-green` or `zero`.
    pub velocity: String,
    pub amplitude: f64,
    /// `isotropic`, `von-mises`, `anisotropic` or `zero`.
    pub density: String,
    /// Anisotropic preset: `(1 + a cos 2theta + c cos x cos y sin 2theta) / 2pi`.
    pub a: f64,
    pub c: f64,
    /// Von Mises concentration and mean direction.
    pub kappa: f64,
    pub theta0: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { velocity: "taylor-green".into(), amplitude: 1.0, density: "anisotropic".into(), a: 0.5, c: 0.3, kappa: 4.0, theta0: 0.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub monitor: MonitorConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub initial: InitialConfig,
}

fn pow2(name: &str, n: usize, errs: &mut Vec<String>) {
    if n < 8 || !n.is_power_of_two() {
        errs.push(format!("{name}: {n} is not a power of two >= 8"));
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn b2(&self) -> f64 {
        self.physics.b2.unwrap_or(self.physics.b)
    }

    /// Every violated constraint, each naming its field.
    pub fn violations(&self) -> Vec<String> {
        let mut e = Vec::new();
        pow2("grid.nx", self.grid.nx, &mut e);
        pow2("grid.ny", self.grid.ny, &mut e);
        pow2("grid.nm", self.grid.nm, &mut e);
        let d = self.grid.dealias_fraction;
        if !(d > 0.0 && d <= 1.0) {
            e.push(format!("grid.dealias_fraction: {d} not in (0, 1]"));
        }
        let p = &self.physics;
        if !(p.nu > 0.0) {
            e.push(format!("physics.nu: {} must be positive", p.nu));
        }
        if !(p.b >= 0.0) {
            e.push(format!("physics.b: {} must be non-negative", p.b));
        }
        if !matches!(p.kernel.as_str(), "maier-saupe" | "none") {
            e.push(format!("physics.kernel: unknown kernel '{}' (expected maier-saupe or none)", p.kernel));
        }
        if let Some(b2) = p.b2 {
            if !b2.is_finite() {
                e.push(format!("physics.b2: {b2} must be finite"));
            }
        }
        if !(p.diffusivity >= 0.0) {
            e.push(format!("physics.diffusivity: {} must be non-negative", p.diffusivity));
        }
        let m = &self.monitor;
        if !(m.s > 0.0) {
            e.push(format!("monitor.s: {} must be positive", m.s));
        }
        if !(m.p >= 1.0) {
            e.push(format!("monitor.p: {} must be >= 1", m.p));
        }
        if m.sample_every == 0 {
            e.push("monitor.sample_every: must be at least 1".into());
        }
        if m.enabled {
            if !(m.beta > 0.0) {
                e.push(format!("monitor.beta: {} must be positive", m.beta));
            }
            if !(m.sigma > 0.0) {
                e.push(format!("monitor.sigma: {} must be positive", m.sigma));
            }
            if !(m.sigma + m.beta < 1.0) {
                e.push(format!("monitor.sigma + monitor.beta: {} must be below 1", m.sigma + m.beta));
            }
            if !(m.lambda > 0.0) {
                e.push(format!("monitor.lambda: {} must be positive", m.lambda));
            }
        }
        let t = &self.time;
        if !(t.dt > 0.0) {
            e.push(format!("time.dt: {} must be positive", t.dt));
        }
        if !(t.t_end >= 0.0) {
            e.push(format!("time.t_end: {} must be non-negative", t.t_end));
        }
        if !(t.cfl_safety > 0.0) {
            e.push(format!("time.cfl_safety: {} must be positive", t.cfl_safety));
        }
        let i = &self.initial;
        if !matches!(i.velocity.as_str(), "taylor-green" | "zero") {
            e.push(format!("initial.velocity: unknown preset '{}'", i.velocity));
        }
        if !matches!(i.density.as_str(), "isotropic" | "von-mises" | "anisotropic" | "zero") {
            e.push(format!("initial.density: unknown preset '{}'", i.density));
        }
        if !(i.kappa >= 0.0) {
            e.push(format!("initial.kappa: {} must be non-negative", i.kappa));
        }
        e
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.violations();
        if e.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(e))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization with the output section cleared,
    /// so that the same physics written to different places hashes alike.
    pub fn hash(&self) -> [u8; 32] {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        Sha256::digest(c.to_toml().as_bytes()).into()
    }
}

/// Read, parse and validate a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_minimal_file() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.physics.nu, 0.1);
        assert_eq!(c.physics.b, 1.0);
        assert_eq!(c.monitor.s, 2.0);
        assert_eq!((c.monitor.sigma, c.monitor.beta, c.monitor.lambda), (0.4, 0.2, 10.0));
        assert_eq!(c.b2(), 1.0);
    }

    #[test]
    fn every_violation_is_named() {
        let e = RunConfig::parse("[grid]\nnx = 100\n[monitor]\nsigma = 0.9\nbeta = 0.2\n").unwrap_err();
        let Error::Config(list) = e else { panic!("expected config error") };
        assert!(list.iter().any(|m| m.starts_with("grid.nx")));
        assert!(list.iter().any(|m| m.starts_with("monitor.sigma + monitor.beta")));
    }

    #[test]
    fn unknown_keys_and_bad_syntax_are_parse_errors() {
        assert!(matches!(RunConfig::parse("[grid]\nnz = 8\n"), Err(Error::Parse(_))));
        assert!(matches!(RunConfig::parse("[grid\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn infinite_exponent_round_trips() {
        let c = RunConfig::parse("[monitor]\np = inf\n").unwrap();
        assert!(c.monitor.p.is_infinite());
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
