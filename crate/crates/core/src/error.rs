use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {left} vs {right} modes per axis")]
    GridMismatch { left: usize, right: usize },
    #[error("negative power {alpha} applied to a field with a nonzero mean mode")]
    NegativePowerOnMeanMode { alpha: f64 },
    #[error("helical basis is undefined at k = 0")]
    ZeroWavevector,
    #[error("field is not divergence-free (relative residual {residual:.3e})")]
    NotDivergenceFree { residual: f64 },
    #[error("field has a nonzero mean mode")]
    NonZeroMean,
    #[error("invalid spectral interval ({lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("no lattice modes with {k_min} <= |k| <= {k_max}")]
    EmptyShellRange { k_min: f64, k_max: f64 },
    #[error("time step {dt:.3e} exceeds the allowed limit {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("solution became non-finite; last valid time {last_valid_t}")]
    NonFinite { last_valid_t: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("observer failed: {0}")]
    Observer(String),
    #[error("need at least {needed} records, got {got}")]
    InsufficientRecords { needed: usize, got: usize },
    #[error("probe constant c1 is missing or not positive")]
    MissingProbeConstant,
    #[error("c5 = {c5} is below the energy {energy}")]
    InvalidC5 { c5: f64, energy: f64 },
    #[error("{path}: bad magic bytes")]
    BadMagic { path: PathBuf },
    #[error("{path}: expected {expected} bytes, found {actual}")]
    SizeMismatch { path: PathBuf, expected: u64, actual: u64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
