//! Regularity-criterion integrands, identity residuals, band inequalities and
//! Gronwall envelopes along a trajectory.

mod bands;
mod integrands;
pub mod probe;
mod schedule;

pub use bands::{band_inequality_suite, BandReport};
pub use integrands::{a_minus, a_plus, integrands_of, mirror_integrands_of, Integrands};
pub use schedule::Schedule;

pub(crate) use schedule::parse_value;



use crate::error::{Error, Result};
use crate::helical::{abs_curl_pow, HelicalDecomposition, SpectralInterval};
use crate::solver::SolverState;
use crate::spectral::{curl, inner_product, l3_norm_physical, physical_many, pointwise_cross, SpectralVectorField};

/// `a`-dependent integrands of `v`.
pub fn criterion_integrands(v: &SpectralVectorField, a: f64) -> Result<Integrands> {
    Ok(integrands_of(&HelicalDecomposition::decompose(v)?, a))
}

/// Mirror diagnostics: the conditions evaluated on `ω⁻`.
pub fn mirror_integrands(v: &SpectralVectorField, a: f64) -> Result<Integrands> {
    Ok(mirror_integrands_of(&HelicalDecomposition::decompose(v)?, a))
}

/// Triple products of `ω⁺`, `v`, `ω⁻` on the padded grid.
struct Triple {
    /// `(ω⁺ × v, ω⁻)`
    cross: f64,
    /// `‖ω⁺‖₃ ‖v‖₃ ‖ω⁻‖₃`
    holder_rhs: f64,
}

fn triple(v: &SpectralVectorField, d: &HelicalDecomposition) -> Triple {
    let w = d.curl();
    let wp = w.band(&SpectralInterval::positive()).recompose();
    let wm = w.band(&SpectralInterval::non_positive()).recompose();
    let phys = physical_many(&[&wp, v, &wm], true);
    let (p, u, m) = (&phys[0], &phys[1], &phys[2]);
    let mut s = 0.0;
    for i in 0..p.len() {
        let (a, b, c) = (p.sample(i), u.sample(i), m.sample(i));
        s += (a[1] * b[2] - a[2] * b[1]) * c[0] + (a[2] * b[0] - a[0] * b[2]) * c[1] + (a[0] * b[1] - a[1] * b[0]) * c[2];
    }
    let h = 2.0 * std::f64::consts::PI / p.n as f64;
    Triple { cross: s * h * h * h, holder_rhs: l3_norm_physical(p) * l3_norm_physical(u) * l3_norm_physical(m) }
}

/// `(ω × v, Av)`, computed from the full vorticity.
fn transport_against_av(v: &SpectralVectorField) -> f64 {
    let prod = pointwise_cross(&curl(v), v).expect("same grid");
    inner_product(&prod, &abs_curl_pow(v, 1.0)).expect("same grid")
}

fn cancellation_from(lhs: f64, cross: f64) -> f64 {
    (lhs + 2.0 * cross).abs() / lhs.abs().max(1.0)
}

/// `|(ω×v, Av) + 2(ω⁺×v, ω⁻)| / max(1, |(ω×v, Av)|)`.
pub fn cancellation_residual(v: &SpectralVectorField) -> Result<f64> {
    let d = HelicalDecomposition::decompose(v)?;
    Ok(cancellation_from(transport_against_av(v), triple(v, &d).cross))
}

/// `(|(ω⁺×v, ω⁻)|, ‖ω⁺‖₃‖v‖₃‖ω⁻‖₃)`.
pub fn holder_chain_check(v: &SpectralVectorField) -> Result<(f64, f64)> {
    let d = HelicalDecomposition::decompose(v)?;
    let t = triple(v, &d);
    Ok((t.cross.abs(), t.holder_rhs))
}

/// One row of the diagnostics table.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub integrands: Integrands,
    /// `(ω⁺ × v, ω⁻)`
    pub cross_term: f64,
    pub cancel_resid: f64,
    pub holder_rhs: f64,
    pub bands: BandReport,
    /// Filled by [`apply_envelope`]; NaN until then.
    pub envelope: f64,
    pub envelope_ok: bool,
}

/// Full diagnostics of one state at threshold `a` and energy bound `c5`.
pub fn diagnose(state: &SolverState, a: f64, c5: f64, c34: Option<(f64, f64)>) -> Result<DiagnosticsRecord> {
    let v = &state.v;
    let d = HelicalDecomposition::decompose(v)?;
    let integrands = integrands_of(&d, a);
    let tri = triple(v, &d);
    let bands = bands::band_suite_of(v, &d, a, c5, c34)?;
    Ok(DiagnosticsRecord {
        t: state.t,
        integrands,
        cross_term: tri.cross,
        cancel_resid: cancellation_from(transport_against_av(v), tri.cross),
        holder_rhs: tri.holder_rhs,
        bands,
        envelope: f64::NAN,
        envelope_ok: false,
    })
}

/// Residual of `½ dY/dt - 2(ω⁺×v, ω⁻) + ‖A^{3/2}v‖² = 0` between consecutive
/// records: centered difference of `Y`, midpoint averages of the other terms.
pub fn energy_identity_residual(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    if records.len() < 2 {
        return Err(Error::InsufficientRecords { needed: 2, got: records.len() });
    }
    Ok(records
        .windows(2)
        .map(|w| {
            let (r0, r1) = (&w[0], &w[1]);
            let dt = r1.t - r0.t;
            let dy = 0.5 * (r1.integrands.y - r0.integrands.y) / dt;
            let cross = 0.5 * (r0.cross_term + r1.cross_term);
            let a32 = 0.5 * (r0.integrands.a32_sq + r1.integrands.a32_sq);
            (dy - 2.0 * cross + a32).abs()
        })
        .collect())
}

/// Integrand driving the envelope exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeCondition {
    /// `g = ‖(-Δ)^{1/4}ω⁺‖²`
    PositiveVorticity,
    /// `g = c₃‖ω⁺‖² + c₄‖(-Δ)^{3/4}ω₃⁺‖²`
    ThirdComponent { c3: f64, c4: f64 },
}

impl EnvelopeCondition {
    fn g(&self, r: &DiagnosticsRecord) -> f64 {
        match *self {
            EnvelopeCondition::PositiveVorticity => r.integrands.cond_i,
            EnvelopeCondition::ThirdComponent { c3, c4 } => c3 * r.integrands.omega_plus_sq + c4 * r.integrands.cond_ii,
        }
    }
}

/// `Y(τ) exp(4 ĉ₁⁶ ∫_τ^t g)` from the first record, trapezoidal in time, with
/// the flag `Y(t) <= envelope(t)`.
pub fn gronwall_envelope(records: &[DiagnosticsRecord], c1_hat: Option<f64>, cond: EnvelopeCondition) -> Result<Vec<(f64, bool)>> {
    let c1 = match c1_hat {
        Some(c) if c > 0.0 && c.is_finite() => c,
        _ => return Err(Error::MissingProbeConstant),
    };
    let Some(first) = records.first() else { return Ok(Vec::new()) };
    let y0 = first.integrands.y;
    let rate = 4.0 * c1.powi(6);
    let mut integral = 0.0;
    let mut out = Vec::with_capacity(records.len());
    for (j, r) in records.iter().enumerate() {
        if j > 0 {
            let p = &records[j - 1];
            integral += 0.5 * (r.t - p.t) * (cond.g(p) + cond.g(r));
        }
        let env = y0 * (rate * integral).exp();
        out.push((env, r.integrands.y <= env * (1.0 + 1e-12)));
    }
    Ok(out)
}

pub fn apply_envelope(records: &mut [DiagnosticsRecord], c1_hat: Option<f64>, cond: EnvelopeCondition) -> Result<()> {
    let env = gronwall_envelope(records, c1_hat, cond)?;
    for (r, (e, ok)) in records.iter_mut().zip(env) {
        r.envelope = e;
        r.envelope_ok = ok;
    }
    Ok(())
}

/// Energy bound used by the band suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C5 {
    /// Running maximum of `‖v‖²` over the records so far.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorOptions {
    pub schedule: Schedule,
    pub c5: C5,
    pub c34: Option<(f64, f64)>,
    pub envelope: EnvelopeCondition,
}

/// Builds diagnostics record by record (usable as a solver observer) and
/// probes `ĉ₁` over everything it has seen.
pub struct DiagnosticsAccumulator {
    opts: MonitorOptions,
    running_c5: f64,
    c1_hat: f64,
    records: Vec<DiagnosticsRecord>,
}

impl DiagnosticsAccumulator {
    pub fn new(opts: MonitorOptions) -> Self {
        Self { opts, running_c5: 0.0, c1_hat: 0.0, records: Vec::new() }
    }

    pub fn push(&mut self, state: &SolverState) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(state.t > last.t) {
                return Err(Error::InvalidConfig(format!("record times must increase: {} after {}", state.t, last.t)));
            }
        }
        let c5 = match self.opts.c5 {
            C5::Fixed(c) => c,
            C5::Auto => {
                self.running_c5 = self.running_c5.max(crate::spectral::l2_norm_sq(&state.v));
                self.running_c5
            }
        };
        if let Some(r) = probe::sobolev_ratio(&state.v)? {
            self.c1_hat = self.c1_hat.max(r);
        }
        let rec = diagnose(state, self.opts.schedule.at(state.t), c5, self.opts.c34)?;
        self.records.push(rec);
        Ok(())
    }

    /// Folds `extra` into the `ĉ₁` probe, then fills in the envelope.
    /// Returns the records and the `ĉ₁` used.
    pub fn finish(mut self, extra: &[&SpectralVectorField]) -> Result<(Vec<DiagnosticsRecord>, f64)> {
        let (c1, _) = probe::probe_c1(extra)?;
        let c1 = self.c1_hat.max(c1);
        apply_envelope(&mut self.records, Some(c1), self.opts.envelope)?;
        Ok((self.records, c1))
    }
}

impl crate::solver::Observer for DiagnosticsAccumulator {
    fn observe(&mut self, _step: usize, state: &SolverState) -> Result<()> {
        self.push(state)
    }
}

/// Diagnostics for a time-ordered list of states; `ĉ₁` is probed over the
/// states plus ABC and Taylor–Green on the same grid.
pub fn monitor(states: &[SolverState], opts: &MonitorOptions) -> Result<(Vec<DiagnosticsRecord>, f64)> {
    let mut acc = DiagnosticsAccumulator::new(opts.clone());
    for s in states {
        acc.push(s)?;
    }
    let Some(first) = states.first() else { return Ok((Vec::new(), 0.0)) };
    let grid = *first.v.grid();
    let abc = crate::flows::abc_flow(grid, 1.0, 1.0, 1.0);
    let tg = crate::flows::taylor_green(grid);
    acc.finish(&[&abc, &tg])
}
