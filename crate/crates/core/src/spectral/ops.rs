//! Fourier multipliers, Parseval inner products, norms and dealiased products.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::Fft3;
use super::field::{padded_index_map, PhysicalVectorField, SpectralField, SpectralVectorField};
use super::grid::{k_sq, kf, Dealias, GridSpec};
use crate::error::{Error, Result};
use crate::BOX_VOLUME;

#[inline]
pub(crate) fn cross_c(k: [f64; 3], c: [Complex64; 3]) -> [Complex64; 3] {
    [c[2] * k[1] - c[1] * k[2], c[0] * k[2] - c[2] * k[0], c[1] * k[0] - c[0] * k[1]]
}

#[inline]
fn cross_r(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Projection onto divergence-free, zero-mean fields: `ĉ ↦ ĉ - k (k·ĉ)/|k|²`, `ĉ(0) ↦ 0`.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let c = f.map_modes(|k, c| {
        let k2 = k_sq(k);
        if k2 == 0.0 {
            return [Complex64::default(); 3];
        }
        let kk = kf(k);
        let dot = (c[0] * kk[0] + c[1] * kk[1] + c[2] * kk[2]) / k2;
        [c[0] - dot * kk[0], c[1] - dot * kk[1], c[2] - dot * kk[2]]
    });
    SpectralVectorField::with_flags(*f.grid(), c, true, true)
}

/// `ĉ(k) ↦ i k × ĉ(k)`.
pub fn curl(f: &SpectralVectorField) -> SpectralVectorField {
    let c = f.map_modes(|k, c| {
        let x = cross_c(kf(k), c);
        let i = Complex64::i();
        [i * x[0], i * x[1], i * x[2]]
    });
    SpectralVectorField::with_flags(*f.grid(), c, true, true)
}

/// `(-Δ)^α`: multiplier `|k|^{2α}`, with the mean mode sent to zero.
pub fn neg_laplacian_pow<F: SpectralField>(f: &F, alpha: f64) -> Result<F> {
    if alpha < 0.0 && !f.mean_is_zero() {
        return Err(Error::NegativePowerOnMeanMode { alpha });
    }
    if alpha == 0.0 {
        return Ok(f.apply_multiplier(|k| if k == [0, 0, 0] { 0.0 } else { 1.0 }));
    }
    Ok(f.apply_multiplier(|k| {
        let k2 = k_sq(k);
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(alpha)
        }
    }))
}

/// `(f, g) = (2π)³ Σ_k Re(ĉ_f · conj ĉ_g)`.
pub fn inner_product<F: SpectralField>(f: &F, g: &F) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    Ok(BOX_VOLUME * f.coefficient_dot(g))
}

pub fn l2_norm_sq<F: SpectralField>(f: &F) -> f64 {
    BOX_VOLUME * f.coefficient_dot(f)
}

pub fn l2_norm<F: SpectralField>(f: &F) -> f64 {
    l2_norm_sq(f).sqrt()
}

/// `‖∇f‖² = (2π)³ Σ |k|² |ĉ(k)|²`.
pub fn grad_norm_sq(f: &SpectralVectorField) -> f64 {
    let g = f.grid();
    let mut s = 0.0;
    for idx in 0..g.len() {
        let m = f.mode(idx);
        s += k_sq(g.wavevector(idx)) * (m[0].norm_sqr() + m[1].norm_sqr() + m[2].norm_sqr());
    }
    BOX_VOLUME * s
}

/// `‖f‖₃` by the rectangle rule on the native grid.
pub fn l3_norm(f: &SpectralVectorField) -> f64 {
    l3_norm_physical(&f.to_physical())
}

pub fn l3_norm_physical(p: &PhysicalVectorField) -> f64 {
    let h = 2.0 * std::f64::consts::PI / p.n as f64;
    let line = p.n;
    let s: f64 = (0..p.len() / line)
        .map(|j| (j * line..(j + 1) * line).map(|i| p.magnitude(i).powi(3)).sum::<f64>())
        .sum();
    (s * h * h * h).cbrt()
}

/// Physical samples of several fields, sharing complex transforms between
/// component pairs. `padded` selects the `3n/2` grid.
pub(crate) fn physical_many(fields: &[&SpectralVectorField], padded: bool) -> Vec<PhysicalVectorField> {
    let Some(first) = fields.first() else { return Vec::new() };
    let grid = *first.grid();
    let (m, spectra): (usize, Vec<Vec<Complex64>>) = if padded {
        let m = grid.padded_n();
        let map = padded_index_map(&grid);
        let spectra = fields
            .iter()
            .flat_map(|f| f.coeffs().iter())
            .map(|c| {
                let mut p = vec![Complex64::default(); m * m * m];
                for (idx, slot) in map.iter().enumerate() {
                    if let Some(pi) = slot {
                        p[*pi] = c[idx];
                    }
                }
                p
            })
            .collect();
        (m, spectra)
    } else {
        (grid.n(), Vec::new())
    };
    let refs: Vec<&[Complex64]> = if padded {
        spectra.iter().map(|s| s.as_slice()).collect()
    } else {
        fields.iter().flat_map(|f| f.coeffs().iter()).map(|c| c.as_slice()).collect()
    };
    let mut reals = Fft3::get(m).inverse_real(&refs).into_iter();
    (0..fields.len())
        .map(|_| PhysicalVectorField { n: m, data: [reals.next().unwrap(), reals.next().unwrap(), reals.next().unwrap()] })
        .collect()
}

pub(crate) fn cross_physical(a: &PhysicalVectorField, b: &PhysicalVectorField) -> PhysicalVectorField {
    let prod: Vec<[f64; 3]> = (0..a.len()).into_par_iter().map(|i| cross_r(a.sample(i), b.sample(i))).collect();
    PhysicalVectorField::from_samples(a.n, &prod)
}

/// `f × g` evaluated on the three-halves padded grid and truncated to the
/// native lattice: exact on the lattice for band-limited inputs.
pub fn pointwise_cross(f: &SpectralVectorField, g: &SpectralVectorField) -> Result<SpectralVectorField> {
    f.grid().check_same(g.grid())?;
    let phys = physical_many(&[f, g], true);
    let prod = cross_physical(&phys[0], &phys[1]);
    Ok(SpectralVectorField::from_padded_physical(*f.grid(), &prod))
}

/// `f × g` on the native grid, truncated to `|k_i| <= (n-1)/3`. Exact on the
/// retained set when both inputs already lie inside it.
pub fn cross_two_thirds(f: &SpectralVectorField, g: &SpectralVectorField) -> Result<SpectralVectorField> {
    f.grid().check_same(g.grid())?;
    let phys = physical_many(&[f, g], false);
    Ok(two_thirds_product(f.grid(), &phys[0], &phys[1]))
}

pub(crate) fn two_thirds_product(grid: &GridSpec, a: &PhysicalVectorField, b: &PhysicalVectorField) -> SpectralVectorField {
    let prod = cross_physical(a, b);
    let f = SpectralVectorField::from_physical(*grid, &prod);
    truncate_two_thirds(&f)
}

pub fn truncate_two_thirds(f: &SpectralVectorField) -> SpectralVectorField {
    let grid = *f.grid();
    let c = f.map_modes(|k, c| if grid.in_two_thirds(k) { c } else { [Complex64::default(); 3] });
    SpectralVectorField::with_flags(grid, c, f.is_divergence_free(), f.is_zero_mean())
}

/// Dealiased product according to the grid's rule.
pub fn dealiased_cross(f: &SpectralVectorField, g: &SpectralVectorField) -> Result<SpectralVectorField> {
    match f.grid().dealias() {
        Dealias::TwoThirds => cross_two_thirds(f, g),
        Dealias::ThreeHalves => pointwise_cross(f, g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralScalarField;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        l2_norm(&(a - b)) / l2_norm(b).max(1e-300)
    }

    #[test]
    fn leray_examples() {
        let g = grid(8);
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair([1, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(leray_project(&f).max_abs(), 0.0);

        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair([1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(leray_project(&f).max_abs_diff(&f), 0.0);

        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair([1, 1, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let p = leray_project(&f);
        // ĉ - k(k·ĉ)/|k|² = (1,0,0) - (1,1,0)/2
        let m = p.mode_at([1, 1, 0]);
        assert!((m[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[1] - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(m[2], c(0.0, 0.0));
    }

    #[test]
    fn leray_zeroes_mean_and_divergence() {
        let g = grid(8);
        let f = SpectralVectorField::from_fn(g, |x, y, z| [1.0 + x.sin() * y.cos(), z.sin() + x.cos(), 0.3 + y.sin()]);
        let p = leray_project(&f);
        assert!(p.divergence_residual() < 1e-15);
        assert!(p.mode(0).iter().all(|z| *z == c(0.0, 0.0)));
        let pp = leray_project(&p);
        assert!(pp.max_abs_diff(&p) < 1e-16);
    }

    #[test]
    fn curl_of_shear() {
        let g = grid(16);
        let v = SpectralVectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()]);
        let expected = SpectralVectorField::from_fn(g, |x, _, _| [0.0, -x.cos(), 0.0]);
        assert!(rel_diff(&curl(&v), &expected) < 1e-14);
        let zero = SpectralVectorField::zeros(g);
        assert_eq!(curl(&zero).max_abs(), 0.0);
    }

    #[test]
    fn fractional_laplacian_examples() {
        let g = grid(8);
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair([0, 2, 0], [c(0.3, 0.1), c(0.0, 0.0), c(0.0, -0.2)]);
        let id = neg_laplacian_pow(&f, 0.0).unwrap();
        assert_eq!(id.max_abs_diff(&f), 0.0);
        let four = neg_laplacian_pow(&f, 1.0).unwrap();
        assert!(four.max_abs_diff(&(&f * 4.0)) < 1e-15);

        let mut s = SpectralScalarField::zeros(g);
        s.set_mode_pair([2, 0, 0], c(1.0, 0.0));
        let r = neg_laplacian_pow(&s, 0.75).unwrap();
        assert!((r.mode_at([2, 0, 0]) - c(2f64.powf(1.5), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn negative_power_requires_zero_mean() {
        let g = grid(8);
        let f = SpectralVectorField::from_fn(g, |x, _, _| [1.0 + x.sin(), 0.0, 0.0]);
        assert!(matches!(neg_laplacian_pow(&f, -0.5), Err(Error::NegativePowerOnMeanMode { .. })));
        let p = leray_project(&f);
        assert!(neg_laplacian_pow(&p, -0.5).is_ok());
    }

    #[test]
    fn inner_product_examples() {
        let g = grid(8);
        let mut f = SpectralVectorField::zeros(g);
        f.set_mode_pair([1, 0, 0], [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let e = l2_norm_sq(&f);
        assert!((e - BOX_VOLUME / 2.0).abs() < 1e-12 * BOX_VOLUME);

        let mut h = SpectralVectorField::zeros(g);
        h.set_mode_pair([0, 1, 0], [c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(inner_product(&f, &h).unwrap(), 0.0);

        let other = SpectralVectorField::zeros(grid(10));
        assert!(matches!(inner_product(&f, &other), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn l3_examples() {
        let g = grid(32);
        assert_eq!(l3_norm(&SpectralVectorField::zeros(g)), 0.0);

        let unit = SpectralVectorField::from_fn(g, |x, _, _| [x.cos(), x.sin(), 0.0]);
        assert!((l3_norm(&unit) - 2.0 * PI).abs() < 1e-12);

        let g64 = grid(64);
        let s = SpectralVectorField::from_fn(g64, |x, _, _| [x.sin(), 0.0, 0.0]);
        let exact = ((2.0 * PI).powi(2) * 8.0 / 3.0).cbrt();
        // |sin|³ has a kink; rectangle-rule error decays like n^-4
        assert!((l3_norm(&s) - exact).abs() / exact < 1e-6, "{}", l3_norm(&s));
    }

    #[test]
    fn cross_examples() {
        let g = grid(16);
        let f = SpectralVectorField::from_fn(g, |x, y, z| [x.sin() + z.cos(), y.cos(), (x + y).sin()]);
        assert!(pointwise_cross(&f, &f).unwrap().max_abs() < 1e-15);

        let a = SpectralVectorField::from_fn(g, |_, _, _| [1.0, 0.0, 0.0]);
        let b = SpectralVectorField::from_fn(g, |x, _, _| [0.0, x.cos(), 0.0]);
        let expected = SpectralVectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.cos()]);
        assert!(pointwise_cross(&a, &b).unwrap().max_abs_diff(&expected) < 1e-15);
        assert!(cross_two_thirds(&a, &b).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn padded_product_is_alias_free_on_the_lattice() {
        // sin²(3x) on n = 8: the native-grid product aliases the k = 6
        // harmonic onto k = -2, the padded product must not.
        let g = grid(8);
        let a = SpectralVectorField::from_fn(g, |x, _, _| [0.0, (3.0 * x).sin(), 0.0]);
        let b = SpectralVectorField::from_fn(g, |x, _, _| [0.0, 0.0, (3.0 * x).sin()]);
        let p = pointwise_cross(&a, &b).unwrap();
        // sin²(3x) = 1/2 - cos(6x)/2; k = 6 is off the n = 8 lattice
        let expected = SpectralVectorField::from_fn(g, |_, _, _| [0.5, 0.0, 0.0]);
        assert!(p.max_abs_diff(&expected) < 1e-15);
    }
}
