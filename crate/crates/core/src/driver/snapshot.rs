//! Binary snapshots of the coupled state.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content |
//! |---|---|---|
//! | 0 | 8 | magic `SMOLSNAP` |
//! | 8 | 4 | format version (`u32`, currently 1) |
//! | 12 | 12 | `nx`, `ny`, `nm` (`u32` each) |
//! | 24 | 8 | time (`f64`) |
//! | 32 | 8 | step counter (`u64`) |
//! | 40 | 32 | SHA-256 of the configuration |
//! | 72 | ... | `v1`, `v2` (`nx*ny` values each), then `f` (`nx*ny*nm` values) as `f64` |
//!
//! Collocation arrays are stored x-major, then y, then theta (theta fastest).

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::coupled::CoupledState;
use crate::error::{Error, Result};
use crate::fluid::VelocityField;
use crate::kinetic::{PhaseField, PhaseGrid};
use crate::lp::SpectralField2D;

pub const MAGIC: &[u8; 8] = b"SMOLSNAP";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 72;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub nm: usize,
    pub t: f64,
    pub step: u64,
    pub config_hash: [u8; 32],
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub f: Vec<f64>,
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize) -> Result<&'a [u8]> {
    let s = bytes.get(*at..*at + n).ok_or_else(|| Error::Snapshot(format!("truncated at byte {}", *at)))?;
    *at += n;
    Ok(s)
}

fn u32_at(bytes: &[u8], at: &mut usize) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, at, 4)?.try_into().expect("4 bytes")))
}

fn f64s(bytes: &[u8], at: &mut usize, n: usize) -> Result<Vec<f64>> {
    let raw = take(bytes, at, 8 * n)?;
    Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

impl Snapshot {
    pub fn from_state(state: &CoupledState<f64>, config_hash: [u8; 32]) -> Self {
        let pg = state.f.phase_grid();
        let [v1, v2] = state.v.physical();
        Self {
            nx: pg.grid().nx(),
            ny: pg.grid().ny(),
            nm: pg.fiber().nm(),
            t: state.t,
            step: state.step,
            config_hash,
            v1,
            v2,
            f: state.f.values_xyt(),
        }
    }

    /// Rebuild the spectral state on `pg`, which must match the stored shape.
    pub fn to_state(&self, pg: &Arc<PhaseGrid<f64>>) -> Result<CoupledState<f64>> {
        let g = pg.grid();
        if (g.nx(), g.ny(), pg.fiber().nm()) != (self.nx, self.ny, self.nm) {
            return Err(Error::Snapshot(format!(
                "snapshot shape {}x{}x{} does not match grid {}x{}x{}",
                self.nx,
                self.ny,
                self.nm,
                g.nx(),
                g.ny(),
                pg.fiber().nm()
            )));
        }
        let mut u1 = SpectralField2D::from_physical(g, &self.v1)?;
        let mut u2 = SpectralField2D::from_physical(g, &self.v2)?;
        u1.dealias();
        u2.dealias();
        Ok(CoupledState { t: self.t, step: self.step, v: VelocityField::new(u1, u2)?, f: PhaseField::from_values_xyt(pg, &self.f)? })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * (self.v1.len() + self.v2.len() + self.f.len()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for n in [self.nx, self.ny, self.nm] {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&self.config_hash);
        for x in self.v1.iter().chain(&self.v2).chain(&self.f) {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut at = 0;
        if take(bytes, &mut at, 8)? != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let version = u32_at(bytes, &mut at)?;
        if version != VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}")));
        }
        let nx = u32_at(bytes, &mut at)? as usize;
        let ny = u32_at(bytes, &mut at)? as usize;
        let nm = u32_at(bytes, &mut at)? as usize;
        let t = f64::from_le_bytes(take(bytes, &mut at, 8)?.try_into().expect("8 bytes"));
        let step = u64::from_le_bytes(take(bytes, &mut at, 8)?.try_into().expect("8 bytes"));
        let config_hash: [u8; 32] = take(bytes, &mut at, 32)?.try_into().expect("32 bytes");
        let expected = HEADER_LEN + 8 * (2 * nx * ny + nx * ny * nm);
        if bytes.len() != expected {
            return Err(Error::Snapshot(format!("payload length {} does not match header ({expected} expected)", bytes.len())));
        }
        let v1 = f64s(bytes, &mut at, nx * ny)?;
        let v2 = f64s(bytes, &mut at, nx * ny)?;
        let f = f64s(bytes, &mut at, nx * ny * nm)?;
        Ok(Self { nx, ny, nm, t, step, config_hash, v1, v2, f })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(&self.to_bytes())?;
        file.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Plain-text dump for plotting: one `x y theta v1 v2 f` line per phase-space point.
    pub fn text_dump(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("# i j k v1 v2 f\n");
        for i in 0..self.nx {
            for j in 0..self.ny {
                let m = i * self.ny + j;
                for k in 0..self.nm {
                    let _ = writeln!(s, "{i} {j} {k} {:?} {:?} {:?}", self.v1[m], self.v2[m], self.f[m * self.nm + k]);
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        let (nx, ny, nm) = (8, 8, 8);
        Snapshot {
            nx,
            ny,
            nm,
            t: 0.125,
            step: 7,
            config_hash: [3; 32],
            v1: (0..nx * ny).map(|i| i as f64 * 0.5).collect(),
            v2: (0..nx * ny).map(|i| -(i as f64)).collect(),
            f: (0..nx * ny * nm).map(|i| (i as f64).sin()).collect(),
        }
    }

    #[test]
    fn bytes_round_trip() {
        let s = sample();
        let b = s.to_bytes();
        assert_eq!(&b[..8], MAGIC);
        assert_eq!(Snapshot::from_bytes(&b).unwrap(), s);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let b = sample().to_bytes();
        assert!(matches!(Snapshot::from_bytes(&b[..b.len() - 8]), Err(Error::Snapshot(_))));
        assert!(matches!(Snapshot::from_bytes(b"NOTASNAP"), Err(Error::Snapshot(_))));
    }
}
