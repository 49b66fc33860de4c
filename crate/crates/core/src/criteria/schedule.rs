use crate::error::{Error, Result};

/// Threshold `a(t)` selecting the positive band `P⁺_a = I - E_a`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// Constant value; `f64::NEG_INFINITY` keeps the whole spectrum.
    Constant(f64),
    /// Piecewise constant, right-continuous: `a(t) = a_i` for `t_i <= t < t_{i+1}`.
    /// Times before the first breakpoint take the first value.
    Table(Vec<(f64, f64)>),
}

impl Schedule {
    pub fn neg_inf() -> Self {
        Schedule::Constant(f64::NEG_INFINITY)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("schedule table is empty".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Config("schedule breakpoints must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || p.1.is_nan() || p.1 == f64::INFINITY) {
            return Err(Error::Config("schedule entries must be finite times and values below +inf".into()));
        }
        Ok(Schedule::Table(points))
    }

    /// Two columns `t a` per line, separated by whitespace or a comma.
    /// Blank lines and `#` comments are skipped; `-inf` is accepted as a value.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Config(format!("schedule line {}: expected two columns", no + 1)));
            }
            let num = |s: &str| parse_value(s).map_err(|_| Error::Config(format!("schedule line {}: bad number {s:?}", no + 1)));
            pts.push((num(cols[0])?, num(cols[1])?));
        }
        Self::table(pts)
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(a) => *a,
            Schedule::Table(pts) => {
                let i = pts.partition_point(|p| p.0 <= t);
                pts[i.saturating_sub(1)].1
            }
        }
    }
}

pub(crate) fn parse_value(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    match s.trim() {
        "-inf" | "neg_inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        other => other.parse::<f64>(),
    }
}
