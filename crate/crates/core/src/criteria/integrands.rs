use num_complex::Complex64;

use crate::helical::{basis_unchecked, HelicalDecomposition, HelicalMode, SpectralInterval};
use crate::BOX_VOLUME;

/// Spectral-sum diagnostics of one field at threshold `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrands {
    pub energy: f64,
    pub grad_sq: f64,
    /// `‖A^{1/2}v‖²`
    pub y: f64,
    /// `‖A^{3/2}v‖²`
    pub a32_sq: f64,
    /// `‖ω⁺‖²`
    pub omega_plus_sq: f64,
    /// `‖(-Δ)^{1/4}ω⁺‖²`
    pub cond_i: f64,
    /// `‖(-Δ)^{3/4}ω₃⁺‖²`
    pub cond_ii: f64,
    /// `‖(-Δ)^{1/4}ω_a⁺‖²`
    pub cond_iii: f64,
    /// `‖(-Δ)^{3/4}ω_{a3}⁺‖²`
    pub cond_iv: f64,
    pub a: f64,
    pub a_plus_cubed: f64,
    /// `+inf` for `a = -inf`.
    pub a_minus_fifth: f64,
}

pub fn a_plus(a: f64) -> f64 {
    a.max(0.0)
}

pub fn a_minus(a: f64) -> f64 {
    (-a).max(0.0)
}

#[derive(Clone, Copy)]
enum Side {
    Plus,
    Minus,
}

/// Sums for `ω⁺` (or `ω⁻` when `side` is `Minus`), reading the helicities the
/// other way round. Sums run in storage order, so swapping `c₊ ↔ c₋` and the
/// side reproduces every single-helicity term bit for bit.
fn condition_sums(d: &HelicalDecomposition, a: f64, side: Side) -> [f64; 5] {
    let band = SpectralInterval::above(a);
    let mut s = [0.0; 5];
    for HelicalMode { k, abs_k, plus, minus, .. } in d.modes() {
        let (own, other) = match side {
            Side::Plus => (plus, minus),
            Side::Minus => (minus, plus),
        };
        if own == Complex64::default() && other == Complex64::default() {
            continue;
        }
        let k2 = abs_k * abs_k;
        let k3 = k2 * abs_k;
        let k5 = k2 * k3;
        let b = basis_unchecked(k);
        let (h_own, h_other) = match side {
            Side::Plus => (b.plus[2], b.minus[2]),
            Side::Minus => (b.minus[2], b.plus[2]),
        };
        let hz2 = h_own.norm_sqr();
        let (o2, t2) = (own.norm_sqr(), other.norm_sqr());
        s[0] += k2 * o2;
        s[1] += k3 * o2;
        s[2] += k5 * o2 * hz2;
        let keep_own = band.contains(abs_k);
        let keep_other = band.contains(-abs_k);
        if keep_own {
            s[3] += k3 * o2;
        }
        if keep_other {
            s[3] += k3 * t2;
        }
        s[4] += match (keep_own, keep_other) {
            (true, true) => k5 * (own * h_own - other * h_other).norm_sqr(),
            (true, false) => k5 * o2 * hz2,
            (false, true) => k5 * t2 * h_other.norm_sqr(),
            (false, false) => 0.0,
        };
    }
    s.map(|x| BOX_VOLUME * x)
}

fn moments(d: &HelicalDecomposition) -> [f64; 4] {
    let mut s = [0.0; 4];
    for m in d.modes() {
        let e = m.plus.norm_sqr() + m.minus.norm_sqr();
        let k2 = m.abs_k * m.abs_k;
        s[0] += e;
        s[1] += k2 * e;
        s[2] += m.abs_k * e;
        s[3] += k2 * m.abs_k * e;
    }
    s.map(|x| BOX_VOLUME * x)
}

pub fn integrands_of(d: &HelicalDecomposition, a: f64) -> Integrands {
    let [energy, grad_sq, y, a32_sq] = moments(d);
    let [omega_plus_sq, cond_i, cond_ii, cond_iii, cond_iv] = condition_sums(d, a, Side::Plus);
    Integrands {
        energy,
        grad_sq,
        y,
        a32_sq,
        omega_plus_sq,
        cond_i,
        cond_ii,
        cond_iii,
        cond_iv,
        a,
        a_plus_cubed: a_plus(a).powi(3),
        a_minus_fifth: a_minus(a).powi(5),
    }
}

/// The same conditions with `ω⁻`, `ω₃⁻` in place of `ω⁺`, `ω₃⁺`, and the band
/// `P⁺_a` reflected to eigenvalues below `-a`.
pub fn mirror_integrands_of(d: &HelicalDecomposition, a: f64) -> Integrands {
    let [energy, grad_sq, y, a32_sq] = moments(d);
    let [omega_plus_sq, cond_i, cond_ii, cond_iii, cond_iv] = condition_sums(d, a, Side::Minus);
    Integrands {
        energy,
        grad_sq,
        y,
        a32_sq,
        omega_plus_sq,
        cond_i,
        cond_ii,
        cond_iii,
        cond_iv,
        a,
        a_plus_cubed: a_plus(a).powi(3),
        a_minus_fifth: a_minus(a).powi(5),
    }
}
