//! Curl eigenbasis and the spectral resolution of curl on the torus.
//!
//! For `k ≠ 0` the divergence-free plane at `k` is spanned by `h₊(k)`, `h₋(k)`
//! with `i k × h± = ±|k| h±`, so curl restricted to divergence-free,
//! zero-mean fields has the discrete spectrum `{±|k|}`. The spectral
//! projection `E_λ` keeps the helical components whose signed eigenvalue is
//! `≤ λ`; `P⁻ = E_0`, `P⁺ = I - E_0`, `P⁺_a = I - E_a`, and `A = |curl|`
//! scales both components by `|k|`.
//!
//! Frame rule: `e₁ = normalize(k × ẑ)` (or `normalize(k × x̂)` when `k ∥ ẑ`),
//! `e₂ = k̂ × e₁`, `h± = (e₁ ± i e₂)/√2`. Since `e₁(-k) = -e₁(k)` and
//! `e₂(-k) = e₂(k)`, reality of a field reads `c±(-k) = -conj c±(k)`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::spectral::{curl, k_sq, kf, GridSpec, SpectralVectorField, DIVERGENCE_TOL};
use crate::BOX_VOLUME;

/// The pair of unit curl eigenvectors at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicalBasis {
    pub plus: [Complex64; 3],
    pub minus: [Complex64; 3],
}

pub fn helical_basis(k: [i64; 3]) -> Result<HelicalBasis> {
    if k == [0, 0, 0] {
        return Err(Error::ZeroWavevector);
    }
    Ok(basis_unchecked(k))
}

#[inline]
pub(crate) fn basis_unchecked(k: [i64; 3]) -> HelicalBasis {
    let kk = kf(k);
    let e1 = if k[0] == 0 && k[1] == 0 {
        normalize([0.0, kk[2], -kk[1]])
    } else {
        normalize([kk[1], -kk[0], 0.0])
    };
    let khat = normalize(kk);
    let e2 = [
        khat[1] * e1[2] - khat[2] * e1[1],
        khat[2] * e1[0] - khat[0] * e1[2],
        khat[0] * e1[1] - khat[1] * e1[0],
    ];
    let s = FRAC_1_SQRT_2;
    let plus = [0, 1, 2].map(|j| Complex64::new(e1[j] * s, e2[j] * s));
    let minus = [0, 1, 2].map(|j| Complex64::new(e1[j] * s, -e2[j] * s));
    HelicalBasis { plus, minus }
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// `conj(h) · c`
#[inline]
fn project(h: &[Complex64; 3], c: &[Complex64; 3]) -> Complex64 {
    h[0].conj() * c[0] + h[1].conj() * c[1] + h[2].conj() * c[2]
}

#[inline]
fn combine(b: &HelicalBasis, cp: Complex64, cm: Complex64) -> [Complex64; 3] {
    [0, 1, 2].map(|j| b.plus[j] * cp + b.minus[j] * cm)
}

/// Interval of signed curl eigenvalues, `lo < λ <= hi`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInterval {
    lo: f64,
    hi: f64,
}

impl SpectralInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn all() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    /// `(0, ∞)`, the range of `P⁺`.
    pub fn positive() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    /// `(-∞, 0]`, the range of `P⁻ = E_0`.
    pub fn non_positive() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: 0.0 }
    }

    /// `(a, ∞)`, the range of `P⁺_a`; `a = -∞` gives everything.
    pub fn above(a: f64) -> Self {
        Self { lo: a, hi: f64::INFINITY }
    }

    /// `(-∞, λ]`, the range of `E_λ`.
    pub fn at_most(lambda: f64) -> Self {
        Self { lo: f64::NEG_INFINITY, hi: lambda }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn contains(&self, lambda: f64) -> bool {
        self.lo < lambda && lambda <= self.hi
    }

    pub fn is_everything(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }
}

/// Helical coefficients `c±(k) = conj h±(k) · ĉ(k)` of a divergence-free,
/// zero-mean field. Slots for `k = 0` and Nyquist modes hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicalDecomposition {
    grid: GridSpec,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

/// One lattice mode seen through the helical frame.
#[derive(Debug, Clone, Copy)]
pub struct HelicalMode {
    pub index: usize,
    pub k: [i64; 3],
    /// `|k|`; the mode's eigenvalues are `±abs_k`.
    pub abs_k: f64,
    pub plus: Complex64,
    pub minus: Complex64,
}

impl HelicalDecomposition {
    pub fn decompose(f: &SpectralVectorField) -> Result<Self> {
        let residual = f.divergence_residual();
        if residual > DIVERGENCE_TOL {
            return Err(Error::NotDivergenceFree { residual });
        }
        if f.mode(0).iter().any(|z| *z != Complex64::default()) {
            return Err(Error::NonZeroMean);
        }
        let grid = *f.grid();
        let (plus, minus): (Vec<Complex64>, Vec<Complex64>) = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let k = grid.wavevector(idx);
                if idx == 0 || grid.is_nyquist(k) {
                    return (Complex64::default(), Complex64::default());
                }
                let b = basis_unchecked(k);
                let c = f.mode(idx);
                (project(&b.plus, &c), project(&b.minus, &c))
            })
            .unzip();
        Ok(Self { grid, plus, minus })
    }

    pub fn from_parts(grid: GridSpec, plus: Vec<Complex64>, minus: Vec<Complex64>) -> Self {
        assert_eq!(plus.len(), grid.len());
        assert_eq!(minus.len(), grid.len());
        Self { grid, plus, minus }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, plus: vec![Complex64::default(); grid.len()], minus: vec![Complex64::default(); grid.len()] }
    }

    pub fn recompose(&self) -> SpectralVectorField {
        let grid = self.grid;
        let modes: Vec<[Complex64; 3]> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (cp, cm) = (self.plus[idx], self.minus[idx]);
                if cp == Complex64::default() && cm == Complex64::default() {
                    return [Complex64::default(); 3];
                }
                combine(&basis_unchecked(grid.wavevector(idx)), cp, cm)
            })
            .collect();
        SpectralVectorField::with_flags(grid, crate::spectral::split(modes), true, true)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn plus(&self) -> &[Complex64] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64] {
        &self.minus
    }

    /// Nonzero-wavevector modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = HelicalMode> + '_ {
        (1..self.grid.len()).filter_map(move |idx| {
            let k = self.grid.wavevector(idx);
            if self.grid.is_nyquist(k) {
                return None;
            }
            Some(HelicalMode { index: idx, k, abs_k: k_sq(k).sqrt(), plus: self.plus[idx], minus: self.minus[idx] })
        })
    }

    /// Coefficient-level `band_project`: components outside the interval are zeroed.
    pub fn band(&self, interval: &SpectralInterval) -> Self {
        let grid = self.grid;
        let (plus, minus) = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if idx == 0 {
                    return (Complex64::default(), Complex64::default());
                }
                let lam = k_sq(grid.wavevector(idx)).sqrt();
                let p = if interval.contains(lam) { self.plus[idx] } else { Complex64::default() };
                let m = if interval.contains(-lam) { self.minus[idx] } else { Complex64::default() };
                (p, m)
            })
            .unzip();
        Self { grid, plus, minus }
    }

    /// `c± ↦ |k|^s c±`, i.e. `A^s`.
    pub fn abs_curl_pow(&self, s: f64) -> Self {
        let grid = self.grid;
        let (plus, minus) = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let w = abs_k_pow(grid.wavevector(idx), s);
                (self.plus[idx] * w, self.minus[idx] * w)
            })
            .unzip();
        Self { grid, plus, minus }
    }

    /// `curl` in helical coordinates: `c± ↦ ±|k| c±`.
    pub fn curl(&self) -> Self {
        let grid = self.grid;
        let (plus, minus) = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let lam = k_sq(grid.wavevector(idx)).sqrt();
                (self.plus[idx] * lam, self.minus[idx] * -lam)
            })
            .unzip();
        Self { grid, plus, minus }
    }

    /// Swaps `c₊ ↔ c₋`.
    pub fn mirror(&self) -> Self {
        Self { grid: self.grid, plus: self.minus.clone(), minus: self.plus.clone() }
    }

    /// Discrete Stieltjes sum `Σ_{λ ∈ I} λ^p (2π)³ |c_λ|²` over signed eigenvalues.
    pub fn moment(&self, p: u32, interval: &SpectralInterval) -> f64 {
        let mut s = 0.0;
        for m in self.modes() {
            if interval.contains(m.abs_k) {
                s += m.abs_k.powi(p as i32) * m.plus.norm_sqr();
            }
            if interval.contains(-m.abs_k) {
                s += (-m.abs_k).powi(p as i32) * m.minus.norm_sqr();
            }
        }
        BOX_VOLUME * s
    }

    pub fn energy(&self) -> f64 {
        self.moment(0, &SpectralInterval::all())
    }

    pub fn plus_energy(&self) -> f64 {
        BOX_VOLUME * self.plus.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn minus_energy(&self) -> f64 {
        BOX_VOLUME * self.minus.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Largest `|c±(-k) + conj c±(k)|`; zero for the decomposition of a real field.
    pub fn reality_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let c = self.grid.conjugate_index(idx);
            e = e.max((self.plus[c] + self.plus[idx].conj()).norm());
            e = e.max((self.minus[c] + self.minus[idx].conj()).norm());
        }
        e
    }
}

#[inline]
pub(crate) fn abs_k_pow(k: [i64; 3], s: f64) -> f64 {
    let k2 = k_sq(k);
    if k2 == 0.0 {
        0.0
    } else if s == 0.0 {
        1.0
    } else {
        k2.powf(0.5 * s)
    }
}

pub fn decompose(f: &SpectralVectorField) -> Result<HelicalDecomposition> {
    HelicalDecomposition::decompose(f)
}

pub fn recompose(d: &HelicalDecomposition) -> SpectralVectorField {
    d.recompose()
}

/// Keeps the helical components whose signed eigenvalue lies in `interval`.
///
/// Modes where both or neither component survive are copied or cleared
/// without a change of basis, so `(-∞, ∞)` returns the input unchanged.
pub fn band_project(f: &SpectralVectorField, interval: &SpectralInterval) -> SpectralVectorField {
    let grid = *f.grid();
    let c = f.map_modes(|k, c| {
        if k == [0, 0, 0] || grid.is_nyquist(k) {
            return [Complex64::default(); 3];
        }
        let lam = k_sq(k).sqrt();
        match (interval.contains(lam), interval.contains(-lam)) {
            (true, true) => c,
            (false, false) => [Complex64::default(); 3],
            (true, false) => {
                let b = basis_unchecked(k);
                combine(&b, project(&b.plus, &c), Complex64::default())
            }
            (false, true) => {
                let b = basis_unchecked(k);
                combine(&b, Complex64::default(), project(&b.minus, &c))
            }
        }
    });
    SpectralVectorField::with_flags(grid, c, true, true)
}

/// `A^s`, realized in the helical frame: both components scaled by `|k|^s`.
pub fn abs_curl_pow(f: &SpectralVectorField, s: f64) -> SpectralVectorField {
    let c = f.map_modes(|k, c| {
        if k == [0, 0, 0] {
            return [Complex64::default(); 3];
        }
        let b = basis_unchecked(k);
        let w = abs_k_pow(k, s);
        combine(&b, project(&b.plus, &c) * w, project(&b.minus, &c) * w)
    });
    SpectralVectorField::with_flags(*f.grid(), c, true, true)
}

/// `A = curl P⁺ - curl P⁻`, the defining form of `|curl|`.
pub fn abs_curl(f: &SpectralVectorField) -> SpectralVectorField {
    let plus = curl(&band_project(f, &SpectralInterval::positive()));
    let minus = curl(&band_project(f, &SpectralInterval::non_positive()));
    &plus - &minus
}

pub fn spectral_moment(f: &SpectralVectorField, p: u32, interval: &SpectralInterval) -> Result<f64> {
    Ok(HelicalDecomposition::decompose(f)?.moment(p, interval))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{cross_c, l2_norm, l2_norm_sq, neg_laplacian_pow};

    fn eig_residual(k: [i64; 3], h: &[Complex64; 3], lam: f64) -> f64 {
        let x = cross_c(kf(k), *h);
        (0..3).map(|j| (Complex64::i() * x[j] - h[j] * lam).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn basis_on_z_axis() {
        let b = helical_basis([0, 0, 1]).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = [Complex64::new(0.0, -s), Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)];
        for j in 0..3 {
            assert!((b.plus[j] - expected[j]).norm() < 1e-16);
        }
        assert!(eig_residual([0, 0, 1], &b.plus, 1.0) < 1e-15);
        assert!(eig_residual([0, 0, 1], &b.minus, -1.0) < 1e-15);
    }

    #[test]
    fn basis_scaling_and_zero() {
        let b = helical_basis([2, 0, 0]).unwrap();
        assert!(eig_residual([2, 0, 0], &b.plus, 2.0) < 1e-15);
        assert!(eig_residual([2, 0, 0], &b.minus, -2.0) < 1e-15);
        assert!(matches!(helical_basis([0, 0, 0]), Err(Error::ZeroWavevector)));
    }

    #[test]
    fn basis_properties_over_lattice() {
        for kx in -4i64..=4 {
            for ky in -4i64..=4 {
                for kz in -4i64..=4 {
                    let k = [kx, ky, kz];
                    if k == [0, 0, 0] {
                        continue;
                    }
                    let b = helical_basis(k).unwrap();
                    let lam = k_sq(k).sqrt();
                    let kk = kf(k);
                    for h in [&b.plus, &b.minus] {
                        let dot: Complex64 = (0..3).map(|j| h[j] * kk[j]).sum();
                        assert!(dot.norm() < 1e-14);
                        let n: f64 = h.iter().map(|z| z.norm_sqr()).sum();
                        assert!((n - 1.0).abs() < 1e-15);
                    }
                    assert!(project(&b.plus, &b.minus).norm() < 1e-15);
                    assert!(eig_residual(k, &b.plus, lam) < 1e-13 * lam);
                    assert!(eig_residual(k, &b.minus, -lam) < 1e-13 * lam);
                    // reality: conj h±(k) = -h±(-k)
                    let bn = helical_basis([-kx, -ky, -kz]).unwrap();
                    for j in 0..3 {
                        assert!((b.plus[j].conj() + bn.plus[j]).norm() < 1e-15);
                        assert!((b.minus[j].conj() + bn.minus[j]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn interval_convention() {
        let i = SpectralInterval::new(-1.0, 2.0).unwrap();
        assert!(!i.contains(-1.0));
        assert!(i.contains(2.0));
        assert!(SpectralInterval::new(3.0, 1.0).is_err());
        assert!(SpectralInterval::new(f64::NAN, 1.0).is_err());
        assert!(SpectralInterval::above(f64::NEG_INFINITY).is_everything());
    }

    fn single_mode(n: usize, k: [i64; 3], cp: Complex64, cm: Complex64) -> SpectralVectorField {
        let g = GridSpec::new(n).unwrap();
        let b = basis_unchecked(k);
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair(k, combine(&b, cp, cm));
        f
    }

    #[test]
    fn negative_mode_decomposes_to_minus_only() {
        let f = single_mode(8, [1, 2, 0], Complex64::default(), Complex64::new(0.3, -0.4));
        let d = decompose(&f).unwrap();
        assert!(d.plus_energy() < 1e-28 * d.minus_energy(), "{}", d.plus_energy());
        assert!((d.minus_energy() - l2_norm_sq(&f)).abs() < 1e-14 * l2_norm_sq(&f));
        assert!(d.reality_error() < 1e-16);
    }

    #[test]
    fn moments_of_single_mode() {
        // unit-norm positive mode at |k| = 2: two conjugate slots share the energy
        let amp = (1.0 / (2.0 * BOX_VOLUME)).sqrt();
        let f = single_mode(8, [0, 2, 0], Complex64::new(amp, 0.0), Complex64::default());
        assert!((l2_norm_sq(&f) - 1.0).abs() < 1e-14);
        let d = decompose(&f).unwrap();
        let pos = SpectralInterval::positive();
        assert!((d.moment(1, &pos) - 2.0).abs() < 1e-13);
        assert!((d.moment(3, &pos) - 8.0).abs() < 1e-13);
        assert!((d.moment(0, &SpectralInterval::all()) - 1.0).abs() < 1e-14);

        let g = single_mode(8, [0, 2, 0], Complex64::default(), Complex64::new(amp, 0.0));
        assert_eq!(spectral_moment(&g, 1, &pos).unwrap(), 0.0);
    }

    #[test]
    fn abs_curl_pow_examples() {
        let f = single_mode(16, [0, 0, 4], Complex64::new(0.2, 0.1), Complex64::default());
        let half = abs_curl_pow(&f, 0.5);
        assert!(half.max_abs_diff(&(&f * 2.0)) < 1e-15);
        let a2 = abs_curl_pow(&f, 2.0);
        let lap = neg_laplacian_pow(&f, 1.0).unwrap();
        assert!(l2_norm(&(&a2 - &lap)) <= 1e-14 * l2_norm(&lap));
    }

    #[test]
    fn band_project_threshold() {
        let f = single_mode(8, [1, 0, 0], Complex64::new(0.5, 0.0), Complex64::default());
        assert_eq!(band_project(&f, &SpectralInterval::above(1.5)).max_abs(), 0.0);
        assert!(band_project(&f, &SpectralInterval::above(0.5)).max_abs_diff(&f) < 1e-16);
        assert_eq!(band_project(&f, &SpectralInterval::all()).max_abs_diff(&f), 0.0);
    }

    #[test]
    fn decompose_rejects_compressible() {
        let g = GridSpec::new(8).unwrap();
        let f = SpectralVectorField::from_fn(g, |x, _, _| [x.sin(), 0.0, 0.0]);
        assert!(matches!(decompose(&f), Err(Error::NotDivergenceFree { .. })));
    }
}
