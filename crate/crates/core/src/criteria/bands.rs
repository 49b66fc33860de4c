use crate::error::{Error, Result};
use crate::helical::{abs_curl_pow, band_project, HelicalDecomposition, SpectralInterval};
use crate::spectral::{curl, l2_norm_sq, SpectralVectorField};

use super::integrands::{a_minus, a_plus, integrands_of};

/// Both sides of each band inequality at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandReport {
    pub a: f64,
    pub c5: f64,
    /// `∫₀^{a₊} λ³ d(E_λv⁺, v⁺)`
    pub ineq_3_2_lhs: f64,
    /// `a₊³‖v⁺‖²`
    pub ineq_3_2_mid: f64,
    /// `c₅a₊³`
    pub ineq_3_2_rhs: f64,
    /// `∫_{a₊}^∞ λ d(E_λω⁺, ω⁺)`
    pub ineq_3_3_lhs: f64,
    /// `‖A^{1/2}ω_a⁺‖²`
    pub ineq_3_3_rhs: f64,
    /// `‖A^{1/2}ω⁺‖²`
    pub ineq_3_5_lhs: f64,
    pub ineq_3_5_rhs: f64,
    pub ineq_3_5_slack: f64,
    /// `∫₀^{|a|} ζ⁵ d(E_ζ v_{(a,0)}, v_{(a,0)})`, zero for `a >= 0`.
    pub ineq_3_10_lhs: f64,
    pub ineq_3_10_rhs: f64,
    /// `(lhs, rhs)` of the `a < 0` estimate with probed `c₃, c₄`.
    pub ineq_3_11: Option<(f64, f64)>,
}

fn scale(x: f64) -> f64 {
    x.abs().max(1.0)
}

impl BandReport {
    /// Names of the inequalities violated beyond `tol` (relative, `max(1, ·)` normalized).
    /// The `c₃, c₄` estimate is a flag and never listed.
    pub fn violations(&self, tol: f64) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.ineq_3_2_lhs - self.ineq_3_2_mid > tol * scale(self.ineq_3_2_mid) {
            v.push("low-band moment");
        }
        if self.ineq_3_2_mid - self.ineq_3_2_rhs > tol * scale(self.ineq_3_2_rhs) {
            v.push("c5 bound");
        }
        let d33 = self.ineq_3_3_lhs - self.ineq_3_3_rhs;
        if self.a >= 0.0 {
            if d33.abs() > tol * scale(self.ineq_3_3_rhs) {
                v.push("band identity");
            }
        } else if d33 > tol * scale(self.ineq_3_3_rhs) {
            v.push("band estimate");
        }
        if self.ineq_3_5_slack < -tol * scale(self.ineq_3_5_rhs) {
            v.push("split slack");
        }
        if self.ineq_3_10_lhs - self.ineq_3_10_rhs > tol * scale(self.ineq_3_10_rhs) {
            v.push("negative-band moment");
        }
        v
    }

    pub fn ineq_3_11_holds(&self) -> Option<bool> {
        self.ineq_3_11.map(|(l, r)| l <= r)
    }
}

/// Evaluates the band inequalities for `v` at threshold `a` with energy bound `c5`.
/// `c34` supplies probed constants for the `a < 0` flag.
pub fn band_inequality_suite(v: &SpectralVectorField, a: f64, c5: f64, c34: Option<(f64, f64)>) -> Result<BandReport> {
    let d = HelicalDecomposition::decompose(v)?;
    band_suite_of(v, &d, a, c5, c34)
}

pub(crate) fn band_suite_of(
    v: &SpectralVectorField,
    d: &HelicalDecomposition,
    a: f64,
    c5: f64,
    c34: Option<(f64, f64)>,
) -> Result<BandReport> {
    let energy = d.energy();
    if !(c5 >= energy * (1.0 - 1e-12)) {
        return Err(Error::InvalidC5 { c5, energy });
    }
    let (ap, am) = (a_plus(a), a_minus(a));
    let ap3 = ap.powi(3);

    let lhs32 = d.moment(3, &SpectralInterval::new(0.0, ap)?);
    let mid32 = ap3 * d.plus_energy();

    let w = d.curl();
    let w_plus = w.band(&SpectralInterval::positive());
    let lhs33 = w_plus.moment(1, &SpectralInterval::above(ap));
    // vector route: band-limit ω, then apply A^{1/2}
    let rhs33 = l2_norm_sq(&abs_curl_pow(&band_project(&curl(v), &SpectralInterval::above(a)), 0.5));

    let lhs35 = w_plus.moment(1, &SpectralInterval::positive());
    let rhs35 = c5 * ap3 + rhs33;

    let (lhs310, rhs310) = if a < 0.0 {
        let lower = d.band(&SpectralInterval::new(a, 0.0)?);
        // λ = -ζ turns the odd moment over (a, 0] into the positive ζ⁵ integral
        (-lower.moment(5, &SpectralInterval::all()), c5 * am.powi(5))
    } else {
        (0.0, 0.0)
    };

    let ineq_3_11 = match (a < 0.0, c34) {
        (true, Some((c3, c4))) => {
            let ints = integrands_of(d, a);
            Some((lhs35, c3 * ints.omega_plus_sq + c4 * (ints.cond_iv + c5 * am.powi(5))))
        }
        _ => None,
    };

    Ok(BandReport {
        a,
        c5,
        ineq_3_2_lhs: lhs32,
        ineq_3_2_mid: mid32,
        ineq_3_2_rhs: c5 * ap3,
        ineq_3_3_lhs: lhs33,
        ineq_3_3_rhs: rhs33,
        ineq_3_5_lhs: lhs35,
        ineq_3_5_rhs: rhs35,
        ineq_3_5_slack: rhs35 - lhs35,
        ineq_3_10_lhs: lhs310,
        ineq_3_10_rhs: rhs310,
        ineq_3_11,
    })
}
