//! NHPP software reliability growth models.
//!
//! Each model is a mean value function `μ(t)`, the expected cumulative number
//! of failures observed by time `t`, paired with its failure intensity
//! `λ(t) = dμ/dt`. Under the NHPP assumption the count `N(t)` is Poisson with
//! mean `μ(t)` and has independent increments, which is what the synthetic
//! data generator in [`crate::data`] relies on.
//!
//! Time is unit-agnostic (weeks, days, CPU hours); whatever unit the dataset
//! uses is the unit `b` is expressed in.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Beyond this exponent `e^{-bt}` is treated as exactly zero.
const EXP_UNDERFLOW: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("parameters must be finite and positive, got a={a}, b={b}")]
    InvalidParams { a: f64, b: f64 },
    #[error("power model intensity is singular at t=0 when b<1 (b={0})")]
    PowerSingularity(f64),
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("unknown model '{0}', expected one of: go, pow, dss, mo")]
    UnknownModel(String),
}

/// The four growth curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Goel-Okumoto exponential, `a(1 - e^{-bt})`.
    GoExponential,
    /// Power model, `a t^b`.
    Power,
    /// Yamada delayed S-shaped, `a(1 - (1 + bt)e^{-bt})`.
    DelayedSShaped,
    /// Musa-Okumoto logarithmic, `a ln(1 + bt)`.
    MusaOkumoto,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::GoExponential,
        ModelKind::Power,
        ModelKind::DelayedSShaped,
        ModelKind::MusaOkumoto,
    ];

    /// Short machine name used on the command line and in CSV reports.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::GoExponential => "go",
            ModelKind::Power => "pow",
            ModelKind::DelayedSShaped => "dss",
            ModelKind::MusaOkumoto => "mo",
        }
    }

    /// Row label used in rendered comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::GoExponential => "EXP(G-O)",
            ModelKind::Power => "POW",
            ModelKind::DelayedSShaped => "DSS",
            ModelKind::MusaOkumoto => "M-O",
        }
    }

    /// Whether `μ(t)` approaches `a` as `t → ∞`.
    pub fn is_bounded(self) -> bool {
        matches!(self, ModelKind::GoExponential | ModelKind::DelayedSShaped)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "go" | "g-o" | "exp" | "exp(g-o)" | "goel-okumoto" => Ok(ModelKind::GoExponential),
            "pow" | "power" => Ok(ModelKind::Power),
            "dss" | "delayed-s-shaped" | "s-shaped" => Ok(ModelKind::DelayedSShaped),
            "mo" | "m-o" | "musa-okumoto" => Ok(ModelKind::MusaOkumoto),
            _ => Err(ModelError::UnknownModel(s.to_string())),
        }
    }
}

/// Model parameters: `a` scales the curve (total expected failures for the
/// bounded models), `b` is the shape / detection rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub a: f64,
    pub b: f64,
}

impl Params {
    pub fn new(a: f64, b: f64) -> Result<Self, ModelError> {
        let p = Params { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.a.is_finite() && self.b.is_finite() && self.a > 0.0 && self.b > 0.0 {
            Ok(())
        } else {
            Err(ModelError::InvalidParams { a: self.a, b: self.b })
        }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.a, self.b]
    }

    pub fn from_array(x: [f64; 2]) -> Self {
        Params { a: x[0], b: x[1] }
    }
}

/// Box constraints on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SearchSpace {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
}

impl SearchSpace {
    pub fn new(a_min: f64, a_max: f64, b_min: f64, b_max: f64) -> Result<Self, ModelError> {
        let space = SearchSpace { a_min, a_max, b_min, b_max };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [self.a_min, self.a_max, self.b_min, self.b_max];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(ModelError::InvalidSpace(format!(
                "bounds must be finite and positive: {self:?}"
            )));
        }
        if self.a_min >= self.a_max || self.b_min >= self.b_max {
            return Err(ModelError::InvalidSpace(format!(
                "lower bounds must be below upper bounds: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn lower(&self) -> [f64; 2] {
        [self.a_min, self.b_min]
    }

    pub fn upper(&self) -> [f64; 2] {
        [self.a_max, self.b_max]
    }

    pub fn width(&self) -> [f64; 2] {
        [self.a_max - self.a_min, self.b_max - self.b_min]
    }

    pub fn contains(&self, p: &Params) -> bool {
        (self.a_min..=self.a_max).contains(&p.a) && (self.b_min..=self.b_max).contains(&p.b)
    }

    /// Hard clamp of each coordinate into its interval.
    pub fn clamp(&self, x: [f64; 2]) -> [f64; 2] {
        [
            x[0].clamp(self.a_min, self.a_max),
            x[1].clamp(self.b_min, self.b_max),
        ]
    }

    /// Maps a point of the unit square onto the space.
    pub fn from_unit(&self, u: [f64; 2]) -> [f64; 2] {
        let w = self.width();
        self.clamp([self.a_min + u[0] * w[0], self.b_min + u[1] * w[1]])
    }

    /// Inverse of [`SearchSpace::from_unit`].
    pub fn to_unit(&self, x: [f64; 2]) -> [f64; 2] {
        let w = self.width();
        [(x[0] - self.a_min) / w[0], (x[1] - self.b_min) / w[1]]
    }
}

impl Default for SearchSpace {
    fn default() -> Self {
        default_bounds()
    }
}

/// `a ∈ [1e-5, 2000]`, `b ∈ [1e-5, 1]`, shared by the cuckoo and firefly
/// settings.
pub fn default_bounds() -> SearchSpace {
    SearchSpace {
        a_min: 0.00001,
        a_max: 2000.0,
        b_min: 0.00001,
        b_max: 1.0,
    }
}

fn check(p: &Params, t: f64) -> Result<(), ModelError> {
    if !t.is_finite() || t < 0.0 {
        return Err(ModelError::InvalidTime(t));
    }
    p.validate()
}

/// `e^{-x}` for `x ≥ 0`, flushed to zero past the underflow guard.
fn decay(x: f64) -> f64 {
    if x > EXP_UNDERFLOW {
        0.0
    } else {
        (-x).exp()
    }
}

/// Expected cumulative failures by time `t`.
pub fn mean_value(kind: ModelKind, p: Params, t: f64) -> Result<f64, ModelError> {
    check(&p, t)?;
    let bt = p.b * t;
    let mu = match kind {
        ModelKind::GoExponential => {
            if bt > EXP_UNDERFLOW {
                p.a
            } else {
                -p.a * (-bt).exp_m1()
            }
        }
        ModelKind::Power => {
            if t == 0.0 {
                0.0
            } else {
                p.a * t.powf(p.b)
            }
        }
        ModelKind::DelayedSShaped => {
            if bt > EXP_UNDERFLOW {
                p.a
            } else {
                // 1 - (1 + x)e^{-x} = -expm1(-x) - x e^{-x}, accurate for small x
                p.a * (-(-bt).exp_m1() - bt * (-bt).exp())
            }
        }
        ModelKind::MusaOkumoto => p.a * bt.ln_1p(),
    };
    Ok(mu.max(0.0))
}

/// Failure intensity `λ(t) = dμ/dt`.
///
/// The power model uses `a b t^{b-1}`, the derivative of `a t^b`. It diverges
/// at `t = 0` for `b < 1`, which is reported as [`ModelError::PowerSingularity`].
pub fn failure_intensity(kind: ModelKind, p: Params, t: f64) -> Result<f64, ModelError> {
    check(&p, t)?;
    let (a, b) = (p.a, p.b);
    let bt = b * t;
    let lambda = match kind {
        ModelKind::GoExponential => a * b * decay(bt),
        ModelKind::Power => {
            if t == 0.0 {
                if b < 1.0 {
                    return Err(ModelError::PowerSingularity(b));
                } else if b == 1.0 {
                    a
                } else {
                    0.0
                }
            } else {
                a * b * t.powf(b - 1.0)
            }
        }
        ModelKind::DelayedSShaped => a * b * bt * decay(bt),
        ModelKind::MusaOkumoto => a * b / (1.0 + bt),
    };
    Ok(lambda)
}
