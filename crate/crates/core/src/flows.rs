//! Canonical initial conditions. All constructors return divergence-free,
//! zero-mean fields with exact (analytic) Fourier coefficients where possible.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::helical::basis_unchecked;
use crate::spectral::{k_sq, GridSpec, SpectralVectorField};
use crate::BOX_VOLUME;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Arnold–Beltrami–Childress flow
/// `v = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`, with `curl v = v`.
pub fn abc_flow(grid: GridSpec, a: f64, b: f64, cc: f64) -> SpectralVectorField {
    let mut v = SpectralVectorField::zeros(grid);
    // sin θ = (e^{iθ} - e^{-iθ}) / 2i, cos θ = (e^{iθ} + e^{-iθ}) / 2
    v.set_mode_pair([0, 0, 1], [c(0.0, -a / 2.0), c(a / 2.0, 0.0), c(0.0, 0.0)]);
    v.set_mode_pair([1, 0, 0], [c(0.0, 0.0), c(0.0, -b / 2.0), c(b / 2.0, 0.0)]);
    v.set_mode_pair([0, 1, 0], [c(cc / 2.0, 0.0), c(0.0, 0.0), c(0.0, -cc / 2.0)]);
    v
}

/// `v = (sin x cos y cos z, -cos x sin y cos z, 0)`.
pub fn taylor_green(grid: GridSpec) -> SpectralVectorField {
    let mut v = SpectralVectorField::zeros(grid);
    for sy in [-1i64, 1] {
        for sz in [-1i64, 1] {
            // coefficient at (sx, sy, sz) is (-i sx / 8, i sy / 8, 0); set the sx = +1 half
            v.set_mode_pair([1, sy, sz], [c(0.0, -1.0 / 8.0), c(0.0, sy as f64 / 8.0), c(0.0, 0.0)]);
        }
    }
    v
}

/// Parameters of the random helical ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFieldSpec {
    /// `|c±(k)|² ∝ |k|^slope` per mode.
    pub slope: f64,
    /// Share of the energy carried by `c₊`.
    pub helicity_fraction: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub seed: u64,
}

impl Default for RandomFieldSpec {
    fn default() -> Self {
        Self { slope: -2.0, helicity_fraction: 0.5, k_min: 1, k_max: 4, seed: 0 }
    }
}

fn in_upper_half(k: [i64; 3]) -> bool {
    k[2] > 0 || (k[2] == 0 && (k[1] > 0 || (k[1] == 0 && k[0] > 0)))
}

/// Random divergence-free field with unit `L²` norm on the shells
/// `k_min <= |k| <= k_max`. Deterministic in `seed`.
pub fn random_divfree(grid: GridSpec, spec: &RandomFieldSpec) -> Result<SpectralVectorField> {
    if spec.k_min < 1 {
        return Err(Error::InvalidConfig("k_min must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.helicity_fraction) {
        return Err(Error::InvalidConfig(format!("helicity_fraction {} outside [0, 1]", spec.helicity_fraction)));
    }
    let (kmin2, kmax2) = ((spec.k_min as f64).powi(2), (spec.k_max as f64).powi(2));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draws: Vec<(usize, Complex64, Complex64)> = Vec::new();
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let k2 = k_sq(k);
        if !in_upper_half(k) || grid.is_nyquist(k) || k2 < kmin2 || k2 > kmax2 {
            continue;
        }
        let w = k2.powf(spec.slope / 4.0) * std::f64::consts::FRAC_1_SQRT_2;
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let cp = c(normal(), normal()) * w;
        let cm = c(normal(), normal()) * w;
        draws.push((idx, cp, cm));
    }
    if draws.is_empty() {
        return Err(Error::EmptyShellRange { k_min: spec.k_min as f64, k_max: spec.k_max as f64 });
    }
    // each draw fills k and -k
    let plus_sum: f64 = 2.0 * BOX_VOLUME * draws.iter().map(|d| d.1.norm_sqr()).sum::<f64>();
    let minus_sum: f64 = 2.0 * BOX_VOLUME * draws.iter().map(|d| d.2.norm_sqr()).sum::<f64>();
    let f = spec.helicity_fraction;
    let sp = if f > 0.0 { (f / plus_sum).sqrt() } else { 0.0 };
    let sm = if f < 1.0 { ((1.0 - f) / minus_sum).sqrt() } else { 0.0 };

    let mut v = SpectralVectorField::zeros(grid);
    let mut coeffs = v.clone().into_coeffs();
    for (idx, cp, cm) in draws {
        let k = grid.wavevector(idx);
        let b = basis_unchecked(k);
        let cidx = grid.conjugate_index(idx);
        for j in 0..3 {
            let val = b.plus[j] * (cp * sp) + b.minus[j] * (cm * sm);
            coeffs[j][idx] = val;
            coeffs[j][cidx] = val.conj();
        }
    }
    v = SpectralVectorField::from_coeffs(grid, coeffs);
    Ok(v)
}
