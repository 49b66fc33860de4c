//! Integrating-factor RK4 for `∂_t v = -P_σ(ω × v) + ν Δv` on the periodic box.
//!
//! The rotational form lets the Leray projection absorb `∇(p + |v|²/2)`, so no
//! pressure solve is needed. The viscous factor `e^{-ν|k|²t}` is applied
//! exactly; only the nonlinear term is discretized in time.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{
    curl, grad_norm_sq, k_sq, l2_norm_sq, leray_project, physical_many, pointwise_cross, truncate_two_thirds,
    two_thirds_product, Dealias, GridSpec, SpectralVectorField, DIVERGENCE_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub t_end: f64,
    pub dt_max: f64,
    /// Safety factor on `Δx / max|v|`.
    pub cfl: f64,
    /// Steps between recorded points and observer calls.
    pub output_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { nu: 1.0, t_end: 1.0, dt_max: 0.01, cfl: 0.5, output_every: 1 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("nu must be positive");
        }
        // t_end = 0 is allowed and yields the initial state only
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be non-negative");
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return bad("dt_max must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub v: SpectralVectorField,
    pub t: f64,
}

/// `-P_σ(ω × v)` with three-halves padded products.
pub fn nonlinear_rhs(v: &SpectralVectorField) -> SpectralVectorField {
    let w = curl(v);
    let prod = pointwise_cross(&w, v).expect("curl preserves the grid");
    &leray_project(&prod) * -1.0
}

pub struct Solver {
    config: SolverConfig,
    grid: GridSpec,
}

impl Solver {
    pub fn new(config: SolverConfig, grid: GridSpec) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, grid })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Largest admissible step for a given peak speed.
    pub fn dt_limit(&self, max_speed: f64) -> f64 {
        if max_speed > 0.0 {
            self.config.dt_max.min(self.config.cfl * self.grid.dx() / max_speed)
        } else {
            self.config.dt_max
        }
    }

    /// Nonlinear term under the grid's dealiasing rule, plus `max_x |v(x)|`.
    pub fn rhs(&self, v: &SpectralVectorField) -> (SpectralVectorField, f64) {
        let w = curl(v);
        match self.grid.dealias() {
            Dealias::TwoThirds => {
                let phys = physical_many(&[&w, v], false);
                let speed = phys[1].max_magnitude();
                let prod = two_thirds_product(&self.grid, &phys[0], &phys[1]);
                (&leray_project(&prod) * -1.0, speed)
            }
            Dealias::ThreeHalves => {
                let phys = physical_many(&[&w, v], true);
                let speed = phys[1].max_magnitude();
                let prod = crate::spectral::cross_physical(&phys[0], &phys[1]);
                let prod = SpectralVectorField::from_padded_physical(self.grid, &prod);
                (&leray_project(&prod) * -1.0, speed)
            }
        }
    }

    /// One step of size `dt`; fails if `dt` exceeds `dt_max` or the CFL bound.
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        let (k1, speed) = self.rhs(&state.v);
        let limit = self.dt_limit(speed);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        Ok(self.advance(state, dt, k1))
    }

    fn advance(&self, state: &SolverState, dt: f64, k1: SpectralVectorField) -> SolverState {
        let grid = self.grid;
        let nu = self.config.nu;
        let half: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| (-nu * k_sq(grid.wavevector(i)) * dt * 0.5).exp()).collect();
        let v = state.v.coeffs();

        let lin = |terms: &[(&[Vec<Complex64>; 3], f64, u8)]| -> SpectralVectorField {
            // each term: coefficients, scalar weight, power of the half-step factor
            let mut out: [Vec<Complex64>; 3] = Default::default();
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = (0..grid.len())
                    .into_par_iter()
                    .map(|i| {
                        let e = half[i];
                        terms.iter().fold(Complex64::default(), |acc, (f, w, p)| {
                            let factor = match p {
                                0 => 1.0,
                                1 => e,
                                _ => e * e,
                            };
                            acc + f[c][i] * (w * factor)
                        })
                    })
                    .collect();
            }
            SpectralVectorField::with_flags(grid, out, true, true)
        };

        let a = lin(&[(v, 1.0, 1), (k1.coeffs(), 0.5 * dt, 1)]);
        let (k2, _) = self.rhs(&a);
        let b = lin(&[(v, 1.0, 1), (k2.coeffs(), 0.5 * dt, 0)]);
        let (k3, _) = self.rhs(&b);
        let c = lin(&[(v, 1.0, 2), (k3.coeffs(), dt, 1)]);
        let (k4, _) = self.rhs(&c);
        let next = lin(&[
            (v, 1.0, 2),
            (k1.coeffs(), dt / 6.0, 2),
            (k2.coeffs(), dt / 3.0, 1),
            (k3.coeffs(), dt / 3.0, 1),
            (k4.coeffs(), dt / 6.0, 0),
        ]);
        let mut next = leray_project(&next);
        if grid.dealias() == Dealias::TwoThirds {
            next = truncate_two_thirds(&next);
        }
        SolverState { v: next, t: state.t + dt }
    }
}

/// Callback invoked on recorded states (read-only).
pub trait Observer {
    fn observe(&mut self, step: usize, state: &SolverState) -> Result<()>;
}

impl<F: FnMut(usize, &SolverState) -> Result<()>> Observer for F {
    fn observe(&mut self, step: usize, state: &SolverState) -> Result<()> {
        self(step, state)
    }
}

/// Keeps a copy of every observed state.
#[derive(Debug, Default)]
pub struct SnapshotCollector {
    pub states: Vec<SolverState>,
}

impl Observer for SnapshotCollector {
    fn observe(&mut self, _step: usize, state: &SolverState) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub t: f64,
    /// `‖v‖²`
    pub energy: f64,
    /// `‖∇v‖²`, equal to the enstrophy `‖ω‖²` for divergence-free fields.
    pub grad_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
    /// Composite Simpson on uniformly spaced points (3/8 rule closes an odd count).
    Simpson,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    /// `∫ ‖∇v‖² dt` between point indices `from <= to`.
    pub fn dissipation_integral(&self, from: usize, to: usize, rule: Quadrature) -> Result<f64> {
        let pts = &self.points[from..=to];
        let m = pts.len() - 1;
        if m == 0 {
            return Ok(0.0);
        }
        let trap = |p: &[TrajectoryPoint]| -> f64 { p.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].grad_sq + w[1].grad_sq)).sum() };
        match rule {
            Quadrature::Trapezoid => Ok(trap(pts)),
            Quadrature::Simpson => {
                if m == 1 {
                    return Ok(trap(pts));
                }
                let h = (pts[m].t - pts[0].t) / m as f64;
                if pts.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h) {
                    return Err(Error::InvalidConfig("Simpson quadrature needs uniformly spaced records".into()));
                }
                let f: Vec<f64> = pts.iter().map(|p| p.grad_sq).collect();
                let simpson = |f: &[f64]| -> f64 {
                    (0..(f.len() - 1) / 2).map(|i| h / 3.0 * (f[2 * i] + 4.0 * f[2 * i + 1] + f[2 * i + 2])).sum()
                };
                if m % 2 == 0 {
                    Ok(simpson(&f))
                } else if m == 3 {
                    Ok(3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]))
                } else {
                    let head = simpson(&f[..m - 2]);
                    let t = &f[m - 3..];
                    Ok(head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]))
                }
            }
        }
    }

    /// `‖v(t)‖² + 2ν∫ₛᵗ‖∇v‖² - ‖v(s)‖²` for record indices `s <= t`.
    pub fn energy_residual(&self, nu: f64, s: usize, t: usize, rule: Quadrature) -> Result<f64> {
        let d = self.dissipation_integral(s, t, rule)?;
        Ok(self.points[t].energy + 2.0 * nu * d - self.points[s].energy)
    }
}

fn point(step: usize, state: &SolverState) -> TrajectoryPoint {
    TrajectoryPoint { step, t: state.t, energy: l2_norm_sq(&state.v), grad_sq: grad_norm_sq(&state.v) }
}

/// Runs from `v0` at `t = 0` to `config.t_end`, recording every
/// `output_every` steps and the final state.
pub fn simulate(config: &SolverConfig, v0: &SpectralVectorField, observers: &mut [&mut dyn Observer]) -> Result<Trajectory> {
    let grid = *v0.grid();
    let solver = Solver::new(config.clone(), grid)?;
    let residual = v0.divergence_residual();
    if residual > DIVERGENCE_TOL {
        return Err(Error::NotDivergenceFree { residual });
    }
    if !v0.mode(0).iter().all(|z| *z == Complex64::default()) {
        return Err(Error::NonZeroMean);
    }

    let mut traj = Trajectory::default();
    let mut state = SolverState { v: v0.clone(), t: 0.0 };
    let record = |step: usize, state: &SolverState, traj: &mut Trajectory, observers: &mut [&mut dyn Observer]| -> Result<()> {
        traj.points.push(point(step, state));
        for o in observers.iter_mut() {
            o.observe(step, state)?;
        }
        Ok(())
    };
    record(0, &state, &mut traj, observers)?;

    let eps = 1e-9 * config.dt_max;
    let mut step = 0usize;
    while config.t_end - state.t > eps {
        let (k1, speed) = solver.rhs(&state.v);
        if !speed.is_finite() {
            return Err(Error::NonFinite { last_valid_t: state.t });
        }
        let dt = solver.dt_limit(speed).min(config.t_end - state.t);
        let mut next = solver.advance(&state, dt, k1);
        if !next.v.is_finite() {
            return Err(Error::NonFinite { last_valid_t: state.t });
        }
        let done = config.t_end - next.t <= eps;
        if done {
            next.t = config.t_end;
        }
        state = next;
        step += 1;
        if done || step % config.output_every == 0 {
            record(step, &state, &mut traj, observers)?;
        }
    }
    Ok(traj)
}
