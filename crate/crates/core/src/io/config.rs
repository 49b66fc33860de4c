//! Flat `key=value` run configuration.

use std::path::{Path, PathBuf};

use crate::criteria::{parse_value, Schedule};
use crate::error::{Error, Result};
use crate::flows::{abc_flow, random_divfree, taylor_green, RandomFieldSpec};
use crate::solver::SolverConfig;
use crate::spectral::{GridSpec, SpectralVectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Abc,
    TaylorGreen,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Const(f64),
    NegInf,
    /// Table file; relative paths resolve against the config file's directory.
    Table(PathBuf),
}

impl ScheduleSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "neg_inf" {
            return Ok(ScheduleSpec::NegInf);
        }
        if let Some(v) = s.strip_prefix("const:") {
            let a = parse_value(v).map_err(|_| Error::Config(format!("bad schedule constant {v:?}")))?;
            if a.is_nan() || a == f64::INFINITY {
                return Err(Error::Config(format!("schedule constant {v:?} must be below +inf")));
            }
            return Ok(ScheduleSpec::Const(a));
        }
        if let Some(p) = s.strip_prefix("table:") {
            if p.is_empty() {
                return Err(Error::Config("empty schedule table path".into()));
            }
            return Ok(ScheduleSpec::Table(PathBuf::from(p)));
        }
        Err(Error::Config(format!("unknown a_schedule {s:?}; expected const:<value>, neg_inf or table:<path>")))
    }

    pub fn resolve(&self, base: &Path) -> Result<Schedule> {
        match self {
            ScheduleSpec::Const(a) => Ok(Schedule::Constant(*a)),
            ScheduleSpec::NegInf => Ok(Schedule::neg_inf()),
            ScheduleSpec::Table(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                Schedule::parse_table(&std::fs::read_to_string(&path)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub nu: f64,
    pub t_end: f64,
    pub dt_max: f64,
    pub cfl: f64,
    pub output_every: usize,
    pub init: InitKind,
    pub abc: [f64; 3],
    pub seed: u64,
    pub slope: f64,
    pub helicity_fraction: f64,
    pub k_min: u32,
    pub k_max: u32,
    pub a_schedule: ScheduleSpec,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 32,
            nu: 1.0,
            t_end: 1.0,
            dt_max: 0.01,
            cfl: 0.5,
            output_every: 10,
            init: InitKind::Abc,
            abc: [1.0; 3],
            seed: 0,
            slope: -2.0,
            helicity_fraction: 0.5,
            k_min: 1,
            k_max: 4,
            a_schedule: ScheduleSpec::Const(0.0),
            out_dir: PathBuf::from("out"),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Unknown keys and repeated keys are errors; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {k}", no + 1)));
            }
            match k {
                "n" => c.n = num(k, v)?,
                "nu" => c.nu = num(k, v)?,
                "t_end" => c.t_end = num(k, v)?,
                "dt_max" => c.dt_max = num(k, v)?,
                "cfl" => c.cfl = num(k, v)?,
                "output_every" => c.output_every = num(k, v)?,
                "init" => {
                    c.init = match v {
                        "abc" => InitKind::Abc,
                        "taylor_green" => InitKind::TaylorGreen,
                        "random" => InitKind::Random,
                        _ => return Err(Error::Config(format!("init: unknown value {v:?}"))),
                    }
                }
                "abc_A" => c.abc[0] = num(k, v)?,
                "abc_B" => c.abc[1] = num(k, v)?,
                "abc_C" => c.abc[2] = num(k, v)?,
                "seed" => c.seed = num(k, v)?,
                "slope" => c.slope = num(k, v)?,
                "helicity_fraction" => c.helicity_fraction = num(k, v)?,
                "k_min" => c.k_min = num(k, v)?,
                "k_max" => c.k_max = num(k, v)?,
                "a_schedule" => c.a_schedule = ScheduleSpec::parse(v)?,
                "out_dir" => c.out_dir = PathBuf::from(v),
                _ => return Err(Error::Config(format!("line {}: unknown key {k:?}", no + 1))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.solver_config().validate()?;
        if self.abc.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("abc coefficients must be finite".into()));
        }
        if self.init == InitKind::Random {
            if self.k_min < 1 || self.k_min > self.k_max {
                return Err(Error::Config("random init needs 1 <= k_min <= k_max".into()));
            }
            if !(0.0..=1.0).contains(&self.helicity_fraction) || !self.slope.is_finite() {
                return Err(Error::Config("random init needs helicity_fraction in [0, 1] and a finite slope".into()));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.n).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig { nu: self.nu, t_end: self.t_end, dt_max: self.dt_max, cfl: self.cfl, output_every: self.output_every }
    }

    pub fn random_spec(&self) -> RandomFieldSpec {
        RandomFieldSpec {
            slope: self.slope,
            helicity_fraction: self.helicity_fraction,
            k_min: self.k_min,
            k_max: self.k_max,
            seed: self.seed,
        }
    }

    pub fn initial_field(&self) -> Result<SpectralVectorField> {
        let g = self.grid()?;
        match self.init {
            InitKind::Abc => Ok(abc_flow(g, self.abc[0], self.abc[1], self.abc[2])),
            InitKind::TaylorGreen => Ok(taylor_green(g)),
            InitKind::Random => random_divfree(g, &self.random_spec()),
        }
    }
}
