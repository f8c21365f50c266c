use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("CFL violation: {0}")]
    Cfl(String),
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("time range error: {0}")]
    Range(String),
    #[error("non-monotone sample time {t} (last recorded {last})")]
    NonMonotoneTime { t: f64, last: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("snapshot format error: {0}")]
    Snapshot(String),
    #[error("non-finite state detected at t = {0}")]
    NonFinite(f64),
    #[error("positivity excursion: min f = {min} below floor {floor} at t = {t}")]
    Positivity { min: f64, floor: f64, t: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
