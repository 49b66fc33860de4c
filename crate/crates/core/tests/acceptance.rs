//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use beltrami::criteria::{
    band_inequality_suite, cancellation_residual, criterion_integrands, diagnose, energy_identity_residual, holder_chain_check,
    integrands_of, mirror_integrands_of, monitor, DiagnosticsRecord, EnvelopeCondition, MonitorOptions, Schedule, C5,
};
use beltrami::flows::{abc_flow, random_divfree, taylor_green, RandomFieldSpec};
use beltrami::helical::{abs_curl, abs_curl_pow, band_project, HelicalDecomposition, SpectralInterval};
use beltrami::io::{read_snapshot, write_snapshot, Snapshot};
use beltrami::solver::{simulate, Quadrature, SnapshotCollector, SolverConfig, SolverState};
use beltrami::spectral::{curl, inner_product, l2_norm, l2_norm_sq, neg_laplacian_pow, GridSpec, SpectralVectorField};
use num_complex::Complex64;

type Outcome = Result<(bool, String), String>;

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

fn field(n: usize, seed: u64, fraction: f64, k_max: u32) -> SpectralVectorField {
    let spec = RandomFieldSpec { seed, helicity_fraction: fraction, k_max, slope: -1.0, k_min: 1 };
    random_divfree(grid(n), &spec).unwrap()
}

/// Mixed-helicity ensemble with varied spectra.
fn ensemble(n: usize, count: u64, seed0: u64) -> Vec<SpectralVectorField> {
    (0..count).map(|i| field(n, seed0 + i, 0.2 + 0.6 * (i % 7) as f64 / 6.0, 3 + (i % 9) as u32)).collect()
}

/// `|k|²` multiplier written out from the lattice, independent of the library operator.
fn minus_laplacian_oracle(f: &SpectralVectorField) -> SpectralVectorField {
    let g = *f.grid();
    let c = f.coeffs();
    let out = [0, 1, 2].map(|j| {
        (0..g.len())
            .map(|i| {
                let k = g.wavevector(i);
                c[j][i] * ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
            })
            .collect::<Vec<Complex64>>()
    });
    SpectralVectorField::from_coeffs(g, out)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// 1
fn curl_symmetry() -> Outcome {
    let fs = ensemble(32, 200, 10_000);
    let mut worst: f64 = 0.0;
    for p in fs.chunks(2) {
        let (f, g) = (&p[0], &p[1]);
        let d = inner_product(&curl(f), g).map_err(err)? - inner_product(f, &curl(g)).map_err(err)?;
        let kmax = f.max_active_wavenumber().max(g.max_active_wavenumber());
        worst = worst.max(d.abs() / (l2_norm(f) * l2_norm(g) * kmax));
    }
    Ok((worst <= 1e-12, format!("100 pairs, max normalized asymmetry {worst:.2e} (tol 1e-12)")))
}

// 2
fn stokes_powers() -> Outcome {
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for f in ensemble(32, 10, 20_000) {
        let lap = minus_laplacian_oracle(&f);
        let a2 = abs_curl(&abs_curl(&f));
        w1 = w1.max(l2_norm(&(&a2 - &lap)) / l2_norm(&lap));
        let lib = neg_laplacian_pow(&f, 1.0).map_err(err)?;
        w1 = w1.max(l2_norm(&(&lib - &lap)) / l2_norm(&lap));
        let q = l2_norm(&neg_laplacian_pow(&f, 0.25).map_err(err)?);
        w2 = w2.max((q - l2_norm(&abs_curl_pow(&f, 0.5))).abs() / q);
    }
    Ok((w1 <= 1e-12 && w2 <= 1e-12, format!("‖A²f+Δf‖ rel {w1:.2e}, (-Δ)^1/4 vs A^1/2 rel {w2:.2e} (tol 1e-12)")))
}

// 3
fn projection_algebra() -> Outcome {
    let (pos, neg) = (SpectralInterval::positive(), SpectralInterval::non_positive());
    let zero = Complex64::default();
    let mut exact = true;
    let mut worst: f64 = 0.0;
    let fs = ensemble(32, 6, 30_000);
    for (i, f) in fs.iter().enumerate() {
        let d = HelicalDecomposition::decompose(f).map_err(err)?;
        let (p, m) = (d.band(&pos), d.band(&neg));
        for j in 0..d.plus().len() {
            exact &= p.plus()[j] + m.plus()[j] == d.plus()[j] && p.minus()[j] + m.minus()[j] == d.minus()[j];
        }
        let pm = p.band(&neg);
        exact &= pm.plus().iter().chain(pm.minus()).all(|z| *z == zero);
        exact &= band_project(f, &SpectralInterval::all()).coeffs() == f.coeffs();

        let g = &fs[(i + 1) % fs.len()];
        for iv in [pos, neg] {
            let pf = band_project(f, &iv);
            worst = worst.max(l2_norm(&(&band_project(&pf, &iv) - &pf)) / l2_norm(&pf));
            let adj = inner_product(&pf, g).map_err(err)? - inner_product(f, &band_project(g, &iv)).map_err(err)?;
            worst = worst.max(adj.abs() / (l2_norm(f) * l2_norm(g)));
        }
    }
    Ok((exact && worst <= 1e-12, format!("sum/product identities exact: {exact}; idempotence/self-adjointness {worst:.2e} (tol 1e-12)")))
}

// 4
fn commutation() -> Outcome {
    let pos = SpectralInterval::positive();
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for f in ensemble(32, 10, 40_000) {
        let cf = curl(&f);
        w1 = w1.max(l2_norm(&(&curl(&band_project(&f, &pos)) - &band_project(&cf, &pos))) / l2_norm(&cf));
        let vp = band_project(&f, &pos);
        let wp = curl(&vp);
        w2 = w2.max(l2_norm(&(&wp - &abs_curl_pow(&vp, 1.0))) / l2_norm(&wp));
    }
    Ok((w1 <= 1e-12 && w2 <= 1e-12, format!("curl P⁺ vs P⁺ curl {w1:.2e}, ω⁺ vs Av⁺ {w2:.2e} (tol 1e-12)")))
}

// 5
fn beltrami_oracle() -> Outcome {
    let v0 = abc_flow(grid(32), 1.0, 1.0, 1.0);
    let cfg = SolverConfig { nu: 1.0, t_end: 1.0, dt_max: 0.01, cfl: 0.5, output_every: 10 };
    let mut snaps = SnapshotCollector::default();
    simulate(&cfg, &v0, &mut [&mut snaps]).map_err(err)?;
    let p0 = v0.to_physical();
    let mut worst: f64 = 0.0;
    for s in &snaps.states {
        let p = s.v.to_physical();
        let decay = (-s.t).exp();
        let peak = p0.max_magnitude() * decay;
        for i in 0..p.len() {
            let (a, b) = (p.sample(i), p0.sample(i));
            let d = ((a[0] - decay * b[0]).powi(2) + (a[1] - decay * b[1]).powi(2) + (a[2] - decay * b[2]).powi(2)).sqrt();
            worst = worst.max(d / peak);
        }
    }
    let last_t = snaps.states.last().map_or(0.0, |s| s.t);
    let d = HelicalDecomposition::decompose(&v0).map_err(err)?;
    let minus_zero = d.minus().iter().all(|z| *z == Complex64::default());
    Ok((
        worst <= 1e-6 && minus_zero && last_t == 1.0,
        format!("n=32 to t={last_t}: max relative error {worst:.2e} (tol 1e-6); P⁻(ABC) exactly zero: {minus_zero}"),
    ))
}

// 6
fn energy_equality() -> Outcome {
    let cfg = SolverConfig { nu: 1.0, t_end: 1.0, dt_max: 0.005, cfl: 0.5, output_every: 1 };
    let traj = simulate(&cfg, &taylor_green(grid(64)), &mut []).map_err(err)?;
    let e0 = traj.points[0].energy;
    let mut worst: f64 = 0.0;
    // Simpson needs an even count of intervals from t = 0
    for j in (2..traj.points.len()).step_by(2) {
        let r = traj.energy_residual(1.0, 0, j, Quadrature::Simpson).map_err(err)?;
        worst = worst.max(r.abs() / e0);
    }
    let last = traj.points.len() - 1;
    let end = traj.energy_residual(1.0, 0, last, Quadrature::Simpson).map_err(err)?.abs() / e0;
    worst = worst.max(end);
    Ok((worst <= 1e-6, format!("n=64, t∈[0,{}], {} steps: max relative residual {worst:.2e} (tol 1e-6)", traj.points[last].t, last)))
}

// 7
fn cancellation() -> Outcome {
    let mut worst: f64 = 0.0;
    for f in ensemble(32, 20, 50_000) {
        worst = worst.max(cancellation_residual(&f).map_err(err)?);
    }
    Ok((worst <= 1e-8, format!("20 fields at n=32: max relative residual {worst:.2e} (tol 1e-8)")))
}

fn taylor_green_records(dt: f64) -> Result<(Vec<SolverState>, Vec<DiagnosticsRecord>), String> {
    let cfg = SolverConfig { nu: 1.0, t_end: 0.5, dt_max: dt, cfl: 0.5, output_every: 1 };
    let mut snaps = SnapshotCollector::default();
    simulate(&cfg, &taylor_green(grid(64)), &mut [&mut snaps]).map_err(err)?;
    let e0 = l2_norm_sq(&snaps.states[0].v);
    let recs = snaps.states.iter().map(|s| diagnose(s, 0.0, e0, None)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    Ok((snaps.states, recs))
}

// 8
fn energy_identity(coarse: &[DiagnosticsRecord], fine: &[DiagnosticsRecord]) -> Outcome {
    let max = |r: &[DiagnosticsRecord]| -> Result<f64, String> {
        Ok(energy_identity_residual(r).map_err(err)?.into_iter().fold(0.0, f64::max))
    };
    let (a, b) = (max(coarse)?, max(fine)?);
    let ratio = a / b;
    Ok((ratio >= 3.5, format!("max residual {a:.3e} at Δt=0.02, {b:.3e} at Δt=0.01: ratio {ratio:.3} (need ≥ 3.5)")))
}

// 9 and 10
fn band_suite_and_holder() -> Result<(Outcome, Outcome), String> {
    let fs = ensemble(32, 50, 60_000);
    let mut bad = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut eq_worst: f64 = 0.0;
    let mut holder_min = f64::INFINITY;
    for (i, f) in fs.iter().enumerate() {
        let c5 = l2_norm_sq(f);
        for a in [-3.0, -1.0, 0.0, 1.0, 3.0] {
            let r = band_inequality_suite(f, a, c5, None).map_err(err)?;
            for v in r.violations(1e-10) {
                bad.push(format!("field {i}, a={a}: {v}"));
            }
            if a >= 0.0 {
                eq_worst = eq_worst.max((r.ineq_3_3_lhs - r.ineq_3_3_rhs).abs() / r.ineq_3_3_rhs.abs().max(1.0));
            }
            min_slack = min_slack.min(r.ineq_3_5_slack / r.ineq_3_5_rhs.abs().max(1.0));
        }
        let (l, r) = holder_chain_check(f).map_err(err)?;
        holder_min = holder_min.min((r - l) / r.max(1.0));
    }
    let bands = Ok((
        bad.is_empty(),
        format!("50 fields × 5 thresholds: violations {}, band identity defect {eq_worst:.2e}, min split slack {min_slack:.2e}", bad.len()),
    ));
    let holder = Ok((holder_min >= -1e-10, format!("min relative slack {holder_min:.3e}")));
    Ok((bands, holder))
}

// 11
fn gronwall(states: &[SolverState]) -> Outcome {
    let opts = MonitorOptions {
        schedule: Schedule::Constant(0.0),
        c5: C5::Auto,
        c34: None,
        envelope: EnvelopeCondition::PositiveVorticity,
    };
    let (recs, c1) = monitor(states, &opts).map_err(err)?;
    let ok = recs.iter().all(|r| r.envelope_ok);
    let tightest = recs.iter().map(|r| r.integrands.y / r.envelope).fold(0.0, f64::max);
    Ok((ok, format!("{} records, probed ĉ₁ = {c1:.4}, max Y/envelope {tightest:.4}", recs.len())))
}

// 12
fn reductions() -> Outcome {
    let mut w: f64 = 0.0;
    let mut mirror = true;
    for f in ensemble(32, 5, 70_000) {
        let whole = l2_norm_sq(&neg_laplacian_pow(&curl(&f), 0.25).map_err(err)?);
        let iii = criterion_integrands(&f, f64::NEG_INFINITY).map_err(err)?.cond_iii;
        w = w.max((iii - whole).abs() / whole);
        let d = HelicalDecomposition::decompose(&f).map_err(err)?;
        let swapped = d.mirror();
        for a in [0.0, 1.0, 2.0, -1.0, f64::NEG_INFINITY] {
            let (o, m) = (integrands_of(&d, a), mirror_integrands_of(&swapped, a));
            mirror &= o.cond_i == m.cond_i && o.cond_ii == m.cond_ii && o.cond_iii == m.cond_iii;
        }
    }
    Ok((w <= 1e-12 && mirror, format!("a=-inf cond_iii vs ‖(-Δ)^1/4 ω‖² rel {w:.2e} (tol 1e-12); mirror exact: {mirror}")))
}

// 13
fn io_and_verify() -> Outcome {
    let dir = std::env::temp_dir().join(format!("beltrami-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let path = dir.join("snap.bin");
    let state = SolverState { v: field(16, 3, 0.5, 6), t: 0.75 };
    write_snapshot(&path, &state, 1.0).map_err(err)?;
    let back = read_snapshot(&path).map_err(err)?;
    let same = back.raw == Snapshot::from_state(&state, 1.0);
    let again = dir.join("again.bin");
    back.raw.write(&again).map_err(err)?;
    let bytes_same = std::fs::read(&path).map_err(err)? == std::fs::read(&again).map_err(err)?;
    let _ = std::fs::remove_dir_all(&dir);
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_beltrami")).arg("verify").output().map_err(err)?;
    let code = status.status.code();
    Ok((same && bytes_same && code == Some(0), format!("samples bit-exact: {same}, bytes identical: {bytes_same}, verify exit {code:?}")))
}

fn report(id: u32, name: &str, start: Instant, outcome: Outcome, failures: &mut u32) {
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    println!("{} {id:>2} {name}: {detail} [{secs:.1}s]", if ok { "PASS" } else { "FAIL" });
    *failures += u32::from(!ok);
}

fn main() -> ExitCode {
    let mut failures = 0;
    let t = Instant::now();
    report(1, "curl symmetry", t, curl_symmetry(), &mut failures);
    let t = Instant::now();
    report(2, "stokes operator powers", t, stokes_powers(), &mut failures);
    let t = Instant::now();
    report(3, "helical projection algebra", t, projection_algebra(), &mut failures);
    let t = Instant::now();
    report(4, "curl and projection commute", t, commutation(), &mut failures);
    let t = Instant::now();
    report(5, "beltrami decay", t, beltrami_oracle(), &mut failures);
    let t = Instant::now();
    report(6, "energy equality", t, energy_equality(), &mut failures);
    let t = Instant::now();
    report(7, "cancellation identity", t, cancellation(), &mut failures);

    let t = Instant::now();
    let runs = taylor_green_records(0.02).and_then(|c| taylor_green_records(0.01).map(|f| (c, f)));
    match runs {
        Ok(((_, coarse), (fine_states, fine))) => {
            report(8, "energy identity convergence", t, energy_identity(&coarse, &fine), &mut failures);
            let t = Instant::now();
            report(11, "gronwall envelope", t, gronwall(&fine_states), &mut failures);
        }
        Err(e) => {
            report(8, "energy identity convergence", t, Err(e.clone()), &mut failures);
            report(11, "gronwall envelope", t, Err(e), &mut failures);
        }
    }

    let t = Instant::now();
    match band_suite_and_holder() {
        Ok((bands, holder)) => {
            report(9, "band inequalities", t, bands, &mut failures);
            report(10, "hölder chain", t, holder, &mut failures);
        }
        Err(e) => {
            report(9, "band inequalities", t, Err(e.clone()), &mut failures);
            report(10, "hölder chain", t, Err(e), &mut failures);
        }
    }
    let t = Instant::now();
    report(12, "threshold reduction and mirror symmetry", t, reductions(), &mut failures);
    let t = Instant::now();
    report(13, "snapshot round trip and verify", t, io_and_verify(), &mut failures);

    println!("{} of 13 criteria passed", 13 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
