//! Physical-space snapshots: `HELNSV01`, `u32 n`, `f64 nu`, `f64 t`, then
//! `n³` samples of three interleaved `f64` components, x fastest, all little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::SolverState;
use crate::spectral::{leray_project, GridSpec, PhysicalVectorField, SpectralVectorField, DIVERGENCE_TOL};

pub const MAGIC: &[u8; 8] = b"HELNSV01";
const HEADER: u64 = 8 + 4 + 16;

pub fn snapshot_len(n: usize) -> u64 {
    HEADER + 24 * (n as u64).pow(3)
}

/// File contents as stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub nu: f64,
    pub t: f64,
    pub samples: PhysicalVectorField,
}

impl Snapshot {
    pub fn from_state(state: &SolverState, nu: f64) -> Self {
        Self { n: state.v.grid().n(), nu, t: state.t, samples: state.v.to_physical() }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.nu.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        let mut buf = Vec::with_capacity(24 * self.n * self.n);
        for chunk in (0..self.samples.len()).collect::<Vec<_>>().chunks(self.n * self.n) {
            buf.clear();
            for &i in chunk {
                for c in self.samples.sample(i) {
                    buf.extend_from_slice(&c.to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        let actual = file.metadata()?.len();
        let mut r = BufReader::new(file);
        let disp = path.to_path_buf();
        let mut magic = [0u8; 8];
        if actual < HEADER {
            return Err(Error::SizeMismatch { path: disp.clone(), expected: HEADER, actual });
        }
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadMagic { path: disp.clone() });
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8)?;
        let nu = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let t = f64::from_le_bytes(b8);
        let expected = snapshot_len(n);
        if actual != expected {
            return Err(Error::SizeMismatch { path: disp, expected, actual });
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let samples: Vec<[f64; 3]> = bytes
            .chunks_exact(24)
            .map(|s| [0, 1, 2].map(|c| f64::from_le_bytes(s[8 * c..8 * c + 8].try_into().unwrap())))
            .collect();
        Ok(Self { n, nu, t, samples: PhysicalVectorField::from_samples(n, &samples) })
    }
}

/// A snapshot turned back into solver state.
#[derive(Debug, Clone)]
pub struct LoadedSnapshot {
    pub state: SolverState,
    pub nu: f64,
    /// Stored samples, untouched.
    pub raw: Snapshot,
    /// Divergence residual of the stored samples before any correction.
    pub residual: f64,
    /// Set when the field had to be re-projected or had its mean removed.
    pub reprojected: bool,
}

pub fn write_snapshot(path: &Path, state: &SolverState, nu: f64) -> Result<()> {
    Snapshot::from_state(state, nu).write(path)
}

/// Reads a snapshot and re-derives its spectrum. Fields that are not
/// divergence-free or carry a mean are projected back and flagged.
pub fn read_snapshot(path: &Path) -> Result<LoadedSnapshot> {
    let raw = Snapshot::read(path)?;
    let grid = GridSpec::new(raw.n)?;
    let v = SpectralVectorField::from_physical(grid, &raw.samples);
    if !v.is_finite() {
        return Err(Error::Parse(format!("{}: non-finite samples", path.display())));
    }
    let residual = v.divergence_residual();
    let scale = v.coeffs().iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mean = v.mode(0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let has_mean = mean > DIVERGENCE_TOL * scale;
    let reprojected = residual > DIVERGENCE_TOL || has_mean;
    if reprojected {
        log::warn!("{}: divergence residual {residual:.3e}, mean {mean:.3e}; re-projecting", path.display());
    }
    // always projected: clears transform roundoff in the mean and divergence
    let v = leray_project(&v);
    Ok(LoadedSnapshot { state: SolverState { v, t: raw.t }, nu: raw.nu, raw, residual, reprojected })
}
