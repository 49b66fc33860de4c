use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::Fft3;
use super::grid::{k_sq, GridSpec};

/// Relative divergence residual above which a field is treated as compressible.
pub const DIVERGENCE_TOL: f64 = 1e-10;

/// Real 3-vector samples on an `n³` grid, sample `(i, j, l)` at `2π (i, j, l) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVectorField {
    pub n: usize,
    pub data: [Vec<f64>; 3],
}

impl PhysicalVectorField {
    pub fn zeros(n: usize) -> Self {
        let len = n * n * n;
        Self { n, data: [vec![0.0; len], vec![0.0; len], vec![0.0; len]] }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let samples: Vec<[f64; 3]> = (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j, l) = (idx % n, (idx / n) % n, idx / (n * n));
                f(i as f64 * h, j as f64 * h, l as f64 * h)
            })
            .collect();
        Self::from_samples(n, &samples)
    }

    pub fn from_samples(n: usize, samples: &[[f64; 3]]) -> Self {
        let mut out = Self::zeros(n);
        for (idx, s) in samples.iter().enumerate() {
            for c in 0..3 {
                out.data[c][idx] = s[c];
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.data[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.data[0].is_empty()
    }

    #[inline]
    pub fn sample(&self, idx: usize) -> [f64; 3] {
        [self.data[0][idx], self.data[1][idx], self.data[2][idx]]
    }

    pub fn magnitude(&self, idx: usize) -> f64 {
        let s = self.sample(idx);
        (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.len()).map(|i| self.magnitude(i)).fold(0.0, f64::max)
    }
}

/// Fourier coefficients of a real vector field: `f(x) = Σ_k ĉ(k) e^{ik·x}`.
///
/// Invariants: `ĉ(-k) = conj ĉ(k)`, Nyquist slots are zero. The
/// `divergence_free` and `zero_mean` flags record what the producing
/// operation guarantees; [`SpectralVectorField::divergence_residual`] measures it.
#[derive(Debug, Clone)]
pub struct SpectralVectorField {
    grid: GridSpec,
    coeffs: [Vec<Complex64>; 3],
    divergence_free: bool,
    zero_mean: bool,
}

impl SpectralVectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.len();
        Self {
            grid,
            coeffs: [vec![Complex64::default(); len], vec![Complex64::default(); len], vec![Complex64::default(); len]],
            divergence_free: true,
            zero_mean: true,
        }
    }

    /// Wraps raw coefficients; Nyquist slots are cleared and the flags measured.
    pub fn from_coeffs(grid: GridSpec, coeffs: [Vec<Complex64>; 3]) -> Self {
        let mut f = Self { grid, coeffs, divergence_free: false, zero_mean: false };
        f.clear_nyquist();
        f.refresh_flags();
        f
    }

    pub(crate) fn with_flags(grid: GridSpec, coeffs: [Vec<Complex64>; 3], divergence_free: bool, zero_mean: bool) -> Self {
        Self { grid, coeffs, divergence_free, zero_mean }
    }

    /// Forward transform of physical samples on the native grid.
    pub fn from_physical(grid: GridSpec, phys: &PhysicalVectorField) -> Self {
        assert_eq!(phys.n, grid.n(), "sample grid does not match spectral grid");
        let fft = Fft3::get(grid.n());
        let refs: Vec<&[f64]> = phys.data.iter().map(|d| d.as_slice()).collect();
        let mut spec = fft.forward_real(&refs).into_iter();
        let coeffs = [spec.next().unwrap(), spec.next().unwrap(), spec.next().unwrap()];
        Self::from_coeffs(grid, coeffs)
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> [f64; 3] + Sync) -> Self {
        Self::from_physical(grid, &PhysicalVectorField::from_fn(grid.n(), f))
    }

    /// Forward transform on the padded grid, truncated to the native lattice.
    pub(crate) fn from_padded_physical(grid: GridSpec, phys: &PhysicalVectorField) -> Self {
        let m = grid.padded_n();
        assert_eq!(phys.n, m);
        let fft = Fft3::get(m);
        let refs: Vec<&[f64]> = phys.data.iter().map(|d| d.as_slice()).collect();
        let spec = fft.forward_real(&refs);
        let map = padded_index_map(&grid);
        let coeffs: Vec<Vec<Complex64>> = spec
            .iter()
            .map(|s| map.iter().map(|p| p.map_or(Complex64::default(), |p| s[p])).collect())
            .collect();
        let mut it = coeffs.into_iter();
        Self::with_flags(grid, [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()], false, false)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>; 3] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> [Vec<Complex64>; 3] {
        self.coeffs
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        [self.coeffs[0][idx], self.coeffs[1][idx], self.coeffs[2][idx]]
    }

    pub fn mode_at(&self, k: [i64; 3]) -> [Complex64; 3] {
        self.mode(self.grid.index_of(k))
    }

    /// Sets `ĉ(k) = value` and `ĉ(-k) = conj(value)`; flags are re-measured.
    pub fn set_mode_pair(&mut self, k: [i64; 3], value: [Complex64; 3]) {
        let idx = self.grid.index_of(k);
        let cidx = self.grid.index_of([-k[0], -k[1], -k[2]]);
        for c in 0..3 {
            self.coeffs[c][idx] = value[c];
            self.coeffs[c][cidx] = value[c].conj();
        }
        if idx == cidx {
            for c in 0..3 {
                self.coeffs[c][idx] = Complex64::new(value[c].re, 0.0);
            }
        }
        self.clear_nyquist();
        self.refresh_flags();
    }

    pub fn refresh_flags(&mut self) {
        self.zero_mean = self.mode(0).iter().all(|z| *z == Complex64::default());
        self.divergence_free = self.divergence_residual() <= DIVERGENCE_TOL;
    }

    fn clear_nyquist(&mut self) {
        let grid = self.grid;
        for comp in self.coeffs.iter_mut() {
            comp.par_iter_mut().enumerate().for_each(|(idx, z)| {
                if grid.is_nyquist(grid.wavevector(idx)) {
                    *z = Complex64::default();
                }
            });
        }
    }

    /// `sqrt(Σ|k·ĉ|²) / sqrt(Σ|k|²|ĉ|²)`, zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let c = self.mode(idx);
            let div = c[0] * k[0] as f64 + c[1] * k[1] as f64 + c[2] * k[2] as f64;
            num += div.norm_sqr();
            den += k_sq(k) * (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr());
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Largest `|ĉ(-k) - conj ĉ(k)|` over the lattice.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let cidx = self.grid.conjugate_index(idx);
            for c in 0..3 {
                err = err.max((self.coeffs[c][cidx] - self.coeffs[c][idx].conj()).norm());
            }
        }
        err
    }

    /// Largest wavevector magnitude carrying a nonzero coefficient.
    pub fn max_active_wavenumber(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.mode(i).iter().any(|z| z.norm_sqr() > 0.0))
            .map(|i| k_sq(self.grid.wavevector(i)).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn to_physical(&self) -> PhysicalVectorField {
        let fft = Fft3::get(self.grid.n());
        let refs: Vec<&[Complex64]> = self.coeffs.iter().map(|c| c.as_slice()).collect();
        let mut out = fft.inverse_real(&refs).into_iter();
        PhysicalVectorField { n: self.grid.n(), data: [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()] }
    }

    /// Samples on the `3n/2` padded grid (zero-padded spectrum).
    pub fn to_physical_padded(&self) -> PhysicalVectorField {
        let m = self.grid.padded_n();
        let map = padded_index_map(&self.grid);
        let padded: Vec<Vec<Complex64>> = self
            .coeffs
            .iter()
            .map(|c| {
                let mut p = vec![Complex64::default(); m * m * m];
                for (idx, slot) in map.iter().enumerate() {
                    if let Some(p_idx) = slot {
                        p[*p_idx] = c[idx];
                    }
                }
                p
            })
            .collect();
        let refs: Vec<&[Complex64]> = padded.iter().map(|c| c.as_slice()).collect();
        let mut out = Fft3::get(m).inverse_real(&refs).into_iter();
        PhysicalVectorField { n: m, data: [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()] }
    }

    /// Scalar field holding one Cartesian component.
    pub fn component(&self, c: usize) -> SpectralScalarField {
        SpectralScalarField { grid: self.grid, coeffs: self.coeffs[c].clone() }
    }

    /// Per-mode map preserving flags.
    pub(crate) fn map_modes(&self, f: impl Fn([i64; 3], [Complex64; 3]) -> [Complex64; 3] + Sync) -> [Vec<Complex64>; 3] {
        let grid = self.grid;
        let mapped: Vec<[Complex64; 3]> = (0..grid.len()).into_par_iter().map(|idx| f(grid.wavevector(idx), self.mode(idx))).collect();
        split(mapped)
    }

    /// Largest coefficient-wise distance `max_k |ĉ_a(k) - ĉ_b(k)|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for c in 0..3 {
            for (a, b) in self.coeffs[c].iter().zip(&other.coeffs[c]) {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flat_map(|c| c.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().flat_map(|c| c.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> [Vec<Complex64>; 3] {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(3);
        for c in 0..3 {
            out.push(self.coeffs[c].par_iter().zip(other.coeffs[c].par_iter()).map(|(a, b)| f(*a, *b)).collect());
        }
        let mut it = out.into_iter();
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
    }
}

pub(crate) fn split(modes: Vec<[Complex64; 3]>) -> [Vec<Complex64>; 3] {
    let mut out = [Vec::with_capacity(modes.len()), Vec::with_capacity(modes.len()), Vec::with_capacity(modes.len())];
    for m in modes {
        for c in 0..3 {
            out[c].push(m[c]);
        }
    }
    out
}

/// For each native flat index, the padded-grid flat index (None for Nyquist slots).
pub(crate) fn padded_index_map(grid: &GridSpec) -> Vec<Option<usize>> {
    let m = grid.padded_n() as i64;
    (0..grid.len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            if grid.is_nyquist(k) {
                None
            } else {
                let w = |c: i64| c.rem_euclid(m) as usize;
                Some(w(k[0]) + m as usize * (w(k[1]) + m as usize * w(k[2])))
            }
        })
        .collect()
}

impl Add for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn add(self, rhs: Self) -> SpectralVectorField {
        let c = self.zip_with(rhs, |a, b| a + b);
        SpectralVectorField::with_flags(
            self.grid,
            c,
            self.divergence_free && rhs.divergence_free,
            self.zero_mean && rhs.zero_mean,
        )
    }
}

impl Sub for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn sub(self, rhs: Self) -> SpectralVectorField {
        let c = self.zip_with(rhs, |a, b| a - b);
        SpectralVectorField::with_flags(
            self.grid,
            c,
            self.divergence_free && rhs.divergence_free,
            self.zero_mean && rhs.zero_mean,
        )
    }
}

impl Mul<f64> for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn mul(self, s: f64) -> SpectralVectorField {
        let c = self.map_modes(|_, m| [m[0] * s, m[1] * s, m[2] * s]);
        SpectralVectorField::with_flags(self.grid, c, self.divergence_free, self.zero_mean)
    }
}

impl Neg for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn neg(self) -> SpectralVectorField {
        self * -1.0
    }
}

/// Fourier coefficients of a real scalar field.
#[derive(Debug, Clone)]
pub struct SpectralScalarField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Self {
        for (idx, z) in coeffs.iter_mut().enumerate() {
            if grid.is_nyquist(grid.wavevector(idx)) {
                *z = Complex64::default();
            }
        }
        Self { grid, coeffs }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64 + Sync) -> Self {
        let phys = PhysicalVectorField::from_fn(grid.n(), |x, y, z| [f(x, y, z), 0.0, 0.0]);
        let mut spec = Fft3::get(grid.n()).forward_real(&[phys.data[0].as_slice()]);
        Self::from_coeffs(grid, spec.pop().unwrap())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mode_at(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    pub fn set_mode_pair(&mut self, k: [i64; 3], value: Complex64) {
        let idx = self.grid.index_of(k);
        let cidx = self.grid.index_of([-k[0], -k[1], -k[2]]);
        self.coeffs[idx] = value;
        self.coeffs[cidx] = value.conj();
    }

    pub fn to_physical(&self) -> Vec<f64> {
        Fft3::get(self.grid.n()).inverse_real(&[self.coeffs.as_slice()]).pop().unwrap()
    }

    pub(crate) fn map_modes(&self, f: impl Fn([i64; 3], Complex64) -> Complex64 + Sync) -> Vec<Complex64> {
        let grid = self.grid;
        self.coeffs.par_iter().enumerate().map(|(idx, z)| f(grid.wavevector(idx), *z)).collect()
    }
}

/// Field types that share the mode-wise Fourier multiplier machinery.
pub trait SpectralField: Sized {
    fn grid(&self) -> &GridSpec;
    /// Sum over modes and components of `Re(ĉ_a conj ĉ_b)`, without the volume factor.
    fn coefficient_dot(&self, other: &Self) -> f64;
    fn mean_is_zero(&self) -> bool;
    /// Applies `ĉ(k) ↦ m(k) ĉ(k)`.
    fn apply_multiplier(&self, m: impl Fn([i64; 3]) -> f64 + Sync) -> Self;
}

impl SpectralField for SpectralVectorField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn coefficient_dot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for c in 0..3 {
            for (a, b) in self.coeffs[c].iter().zip(&other.coeffs[c]) {
                s += a.re * b.re + a.im * b.im;
            }
        }
        s
    }

    fn mean_is_zero(&self) -> bool {
        self.mode(0).iter().all(|z| *z == Complex64::default())
    }

    fn apply_multiplier(&self, m: impl Fn([i64; 3]) -> f64 + Sync) -> Self {
        let c = self.map_modes(|k, v| {
            let s = m(k);
            [v[0] * s, v[1] * s, v[2] * s]
        });
        let zero_mean = self.zero_mean || m([0, 0, 0]) == 0.0;
        Self::with_flags(self.grid, c, self.divergence_free, zero_mean)
    }
}

impl SpectralField for SpectralScalarField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn coefficient_dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
    }

    fn mean_is_zero(&self) -> bool {
        self.coeffs[0] == Complex64::default()
    }

    fn apply_multiplier(&self, m: impl Fn([i64; 3]) -> f64 + Sync) -> Self {
        Self { grid: self.grid, coeffs: self.map_modes(|k, z| z * m(k)) }
    }
}
