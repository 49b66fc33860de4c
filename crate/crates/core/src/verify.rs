//! Fast invariant suite behind the `verify` subcommand.

use std::time::Instant;

use num_complex::Complex64;

use crate::criteria::{band_inequality_suite, cancellation_residual, holder_chain_check, integrands_of, mirror_integrands_of};
use crate::error::Result;
use crate::flows::{abc_flow, random_divfree, taylor_green, RandomFieldSpec};
use crate::helical::{abs_curl, abs_curl_pow, band_project, HelicalDecomposition, SpectralInterval};
use crate::io::{read_snapshot, write_snapshot};
use crate::solver::{nonlinear_rhs, simulate, Quadrature, SnapshotCollector, SolverConfig, SolverState};
use crate::spectral::{curl, inner_product, l2_norm, l2_norm_sq, neg_laplacian_pow, GridSpec, SpectralVectorField};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const N: usize = 16;

fn grid() -> GridSpec {
    GridSpec::new(N).unwrap()
}

fn ensemble(count: u64, fraction: f64) -> Result<Vec<SpectralVectorField>> {
    (0..count)
        .map(|s| random_divfree(grid(), &RandomFieldSpec { seed: 1000 + s, helicity_fraction: fraction, k_max: 6, ..Default::default() }))
        .collect()
}

fn rel(x: f64, scale: f64) -> f64 {
    x / scale.max(f64::MIN_POSITIVE)
}

fn curl_symmetric() -> Result<(bool, String)> {
    let fs = ensemble(8, 0.5)?;
    let mut worst: f64 = 0.0;
    for p in fs.windows(2) {
        let (f, g) = (&p[0], &p[1]);
        let d = inner_product(&curl(f), g)? - inner_product(f, &curl(g))?;
        let kmax = f.max_active_wavenumber().max(g.max_active_wavenumber());
        worst = worst.max(rel(d.abs(), l2_norm(f) * l2_norm(g) * kmax));
    }
    Ok((worst <= 1e-12, format!("max relative asymmetry {worst:.3e}")))
}

fn stokes_powers() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for f in ensemble(4, 0.3)? {
        let lap = neg_laplacian_pow(&f, 1.0)?;
        let a2 = abs_curl_pow(&abs_curl_pow(&f, 1.0), 1.0);
        worst = worst.max(rel(l2_norm(&(&a2 - &lap)), l2_norm(&lap)));
        let q = l2_norm(&neg_laplacian_pow(&f, 0.25)?);
        worst = worst.max(rel((q - l2_norm(&abs_curl_pow(&f, 0.5))).abs(), q));
    }
    Ok((worst <= 1e-12, format!("max relative error {worst:.3e}")))
}

fn projection_algebra() -> Result<(bool, String)> {
    let (pos, neg) = (SpectralInterval::positive(), SpectralInterval::non_positive());
    let mut exact = true;
    let mut worst: f64 = 0.0;
    for f in ensemble(4, 0.5)? {
        let d = HelicalDecomposition::decompose(&f)?;
        let (p, m) = (d.band(&pos), d.band(&neg));
        let sum_ok = (0..d.plus().len()).all(|i| p.plus()[i] + m.plus()[i] == d.plus()[i] && p.minus()[i] + m.minus()[i] == d.minus()[i]);
        let pm = p.band(&neg);
        exact &= sum_ok && pm.plus().iter().chain(pm.minus()).all(|z| *z == Complex64::default());
        let pf = band_project(&f, &pos);
        let g = ensemble(1, 0.2)?.remove(0);
        worst = worst.max(rel(l2_norm(&(&band_project(&pf, &pos) - &pf)), l2_norm(&pf)));
        let adj = inner_product(&pf, &g)? - inner_product(&f, &band_project(&g, &pos))?;
        worst = worst.max(rel(adj.abs(), l2_norm(&f) * l2_norm(&g)));
    }
    Ok((exact && worst <= 1e-12, format!("coefficient identities exact: {exact}; idempotence/adjointness {worst:.3e}")))
}

fn commutation() -> Result<(bool, String)> {
    let pos = SpectralInterval::positive();
    let mut worst: f64 = 0.0;
    for f in ensemble(4, 0.6)? {
        let c = l2_norm(&(&curl(&band_project(&f, &pos)) - &band_project(&curl(&f), &pos)));
        worst = worst.max(rel(c, l2_norm(&curl(&f))));
        let vp = band_project(&f, &pos);
        let wp = curl(&vp);
        worst = worst.max(rel(l2_norm(&(&wp - &abs_curl(&vp))), l2_norm(&wp)));
    }
    Ok((worst <= 1e-12, format!("max relative defect {worst:.3e}")))
}

fn beltrami_decay() -> Result<(bool, String)> {
    let v0 = abc_flow(grid(), 1.0, 1.0, 1.0);
    let cfg = SolverConfig { t_end: 0.2, dt_max: 0.01, output_every: 5, ..Default::default() };
    let mut snaps = SnapshotCollector::default();
    simulate(&cfg, &v0, &mut [&mut snaps])?;
    let mut worst: f64 = 0.0;
    for s in &snaps.states {
        let exact = &v0 * (-s.t).exp();
        worst = worst.max(rel(s.v.max_abs_diff(&exact), exact.max_abs()));
    }
    let minus_zero = HelicalDecomposition::decompose(&v0)?.minus().iter().all(|z| *z == Complex64::default());
    Ok((worst <= 1e-6 && minus_zero, format!("max relative deviation {worst:.3e}; P⁻ zero: {minus_zero}")))
}

fn energy_balance() -> Result<(bool, String)> {
    let cfg = SolverConfig { t_end: 0.2, dt_max: 0.005, output_every: 1, ..Default::default() };
    let traj = simulate(&cfg, &taylor_green(grid()), &mut [])?;
    let e0 = traj.points[0].energy;
    let last = traj.points.len() - 1;
    let r = rel(traj.energy_residual(1.0, 0, last, Quadrature::Simpson)?.abs(), e0);
    Ok((r <= 1e-6, format!("relative energy residual {r:.3e}")))
}

fn solver_invariants() -> Result<(bool, String)> {
    let v0 = &ensemble(1, 0.5)?[0] * 5.0;
    let n = nonlinear_rhs(&v0);
    let neutral = rel(inner_product(&n, &v0)?.abs(), l2_norm(&n) * l2_norm(&v0));
    let cfg = SolverConfig { t_end: 0.05, dt_max: 0.001, output_every: 10, ..Default::default() };
    let mut div: f64 = 0.0;
    let mut obs = |_: usize, s: &SolverState| -> Result<()> {
        div = div.max(s.v.divergence_residual());
        Ok(())
    };
    simulate(&cfg, &v0, &mut [&mut obs])?;
    Ok((neutral <= 1e-11 && div <= 1e-10, format!("(N(v), v) relative {neutral:.3e}; divergence {div:.3e}")))
}

fn cancellation() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for f in ensemble(3, 0.5)? {
        worst = worst.max(cancellation_residual(&f)?);
    }
    Ok((worst <= 1e-8, format!("max residual {worst:.3e}")))
}

fn bands_and_holder() -> Result<(bool, String)> {
    let mut bad = Vec::new();
    let mut holder: f64 = f64::INFINITY;
    for (i, f) in ensemble(4, 0.5)?.iter().enumerate() {
        let c5 = l2_norm_sq(f);
        for a in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let r = band_inequality_suite(f, a, c5, None)?;
            for v in r.violations(1e-10) {
                bad.push(format!("field {i} a={a}: {v}"));
            }
        }
        let (l, r) = holder_chain_check(f)?;
        holder = holder.min(r * (1.0 + 1e-10) - l);
    }
    Ok((bad.is_empty() && holder >= 0.0, format!("band violations {:?}; min Hölder slack {holder:.3e}", bad)))
}

fn reductions() -> Result<(bool, String)> {
    let f = &ensemble(1, 0.4)?[0];
    let d = HelicalDecomposition::decompose(f)?;
    let whole = l2_norm_sq(&neg_laplacian_pow(&curl(f), 0.25)?);
    let iii = integrands_of(&d, f64::NEG_INFINITY).cond_iii;
    let r = rel((iii - whole).abs(), whole);
    let (o, m) = (integrands_of(&d, 0.5), mirror_integrands_of(&d.mirror(), 0.5));
    let mirror = o.cond_i == m.cond_i && o.cond_ii == m.cond_ii && o.cond_iii == m.cond_iii && o.cond_iv == m.cond_iv;
    Ok((r <= 1e-12 && mirror, format!("a=-inf reduction {r:.3e}; mirror exact: {mirror}")))
}

fn snapshot_round_trip() -> Result<(bool, String)> {
    let path = std::env::temp_dir().join(format!("beltrami-verify-{}.bin", std::process::id()));
    let state = SolverState { v: taylor_green(grid()), t: 0.125 };
    write_snapshot(&path, &state, 1.0)?;
    let back = read_snapshot(&path);
    let _ = std::fs::remove_file(&path);
    let back = back?;
    let same = back.raw.samples == state.v.to_physical() && back.raw.t == 0.125 && !back.reprojected;
    Ok((same, format!("bit-exact samples: {same}")))
}

pub const CHECKS: [(&str, Check); 12] = [
    ("curl is symmetric", curl_symmetric),
    ("stokes powers", stokes_powers),
    ("projection algebra", projection_algebra),
    ("curl commutes with helical projection", commutation),
    ("beltrami decay", beltrami_decay),
    ("energy balance", energy_balance),
    ("solver invariants", solver_invariants),
    ("cancellation identity", cancellation),
    ("band inequalities and hölder chain", bands_and_holder),
    ("a = -inf reduction and mirror symmetry", reductions),
    ("snapshot round trip", snapshot_round_trip),
    ("random field bookkeeping", random_bookkeeping),
];

fn random_bookkeeping() -> Result<(bool, String)> {
    let f = random_divfree(grid(), &RandomFieldSpec { helicity_fraction: 0.5, seed: 77, ..Default::default() })?;
    let plus = l2_norm_sq(&band_project(&f, &SpectralInterval::positive())) / l2_norm_sq(&f);
    let ok = (plus - 0.5).abs() <= 1e-12 && (l2_norm_sq(&f) - 1.0).abs() <= 1e-12;
    Ok((ok, format!("positive share {plus:.15}")))
}

pub fn run_suite() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}
