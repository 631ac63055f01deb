//! Fitting-error metrics and the objective functions the optimizers minimize.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::FailureDataset;
use crate::models::{mean_value, ModelError, ModelKind, Params};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitnessError {
    #[error("length mismatch: {actual} actual values vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("cannot compute an error metric over zero points")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Rmse,
    Ed,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Ed => "ed",
        }
    }

    pub fn compute(self, actual: &[f64], predicted: &[f64]) -> Result<f64, FitnessError> {
        match self {
            Metric::Rmse => rmse(actual, predicted),
            Metric::Ed => euclidean_distance(actual, predicted),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rmse" => Ok(Metric::Rmse),
            "ed" | "euclidean" => Ok(Metric::Ed),
            _ => Err(format!("unknown metric '{s}', expected rmse or ed")),
        }
    }
}

fn sum_sq(actual: &[f64], predicted: &[f64]) -> Result<f64, FitnessError> {
    if actual.len() != predicted.len() {
        return Err(FitnessError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(FitnessError::Empty);
    }
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(m, mu)| (m - mu) * (m - mu))
        .sum())
}

/// Root mean square error, `sqrt(Σ(m_i - μ_i)² / N)`.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, FitnessError> {
    let n = actual.len() as f64;
    Ok((sum_sq(actual, predicted)? / n).sqrt())
}

/// Euclidean distance, `sqrt(Σ(m_i - μ_i)²)`.
pub fn euclidean_distance(actual: &[f64], predicted: &[f64]) -> Result<f64, FitnessError> {
    Ok(sum_sq(actual, predicted)?.sqrt())
}

/// Anything that scores a parameter pair, lower is better.
///
/// Implementations return `+∞` (or NaN) for points they cannot score; the
/// optimizers treat both as "never better".
pub trait Cost: Sync {
    fn cost(&self, p: &Params) -> f64;
}

impl<F> Cost for F
where
    F: Fn(&Params) -> f64 + Sync,
{
    fn cost(&self, p: &Params) -> f64 {
        self(p)
    }
}

/// A model fitted against a window of observations under one metric.
#[derive(Debug, Clone)]
pub struct Objective {
    kind: ModelKind,
    metric: Metric,
    times: Vec<f64>,
    actual: Vec<f64>,
}

impl Objective {
    pub fn new(kind: ModelKind, window: &FailureDataset, metric: Metric) -> Self {
        Objective {
            kind,
            metric,
            times: window.times().collect(),
            actual: window.failures().collect(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Model predictions at the window's observation times.
    pub fn predict(&self, p: &Params) -> Result<Vec<f64>, ModelError> {
        self.times
            .iter()
            .map(|&t| mean_value(self.kind, *p, t))
            .collect()
    }

    /// Error between the window and the model curve at `p`.
    pub fn evaluate(&self, p: &Params) -> Result<f64, FitnessError> {
        let predicted = self.predict(p)?;
        self.metric.compute(&self.actual, &predicted)
    }
}

/// Domain errors and overflow map to `+∞` so a search simply rejects them.
impl Cost for Objective {
    fn cost(&self, p: &Params) -> f64 {
        match self.evaluate(p) {
            Ok(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticMode};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn metric_examples() {
        let x = [1.0, 2.0, 3.5];
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&x, &x).unwrap(), 0.0);
        assert_relative_eq!(
            rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            3.535_533_905_932_737_6,
            max_relative = 1e-15
        );
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(rmse(&[10.0], &[3.0]).unwrap(), 7.0);
    }

    #[test]
    fn metric_errors() {
        assert_eq!(rmse(&[], &[]), Err(FitnessError::Empty));
        assert_eq!(
            euclidean_distance(&[1.0], &[1.0, 2.0]),
            Err(FitnessError::LengthMismatch { actual: 1, predicted: 2 })
        );
    }

    fn synthetic() -> FailureDataset {
        let times: Vec<f64> = (1..=40).map(f64::from).collect();
        let p = Params::new(300.0, 0.07).unwrap();
        generate_synthetic(ModelKind::GoExponential, p, &times, SyntheticMode::Deterministic, 0).unwrap()
    }

    #[test]
    fn objective_zero_at_generator_params() {
        let d = synthetic();
        for metric in [Metric::Rmse, Metric::Ed] {
            let obj = Objective::new(ModelKind::GoExponential, &d, metric);
            assert_eq!(obj.evaluate(&Params::new(300.0, 0.07).unwrap()).unwrap(), 0.0);
            assert!(obj.evaluate(&Params::new(300.5, 0.07).unwrap()).unwrap() > 0.0);
            assert!(obj.evaluate(&Params::new(300.0, 0.0701).unwrap()).unwrap() > 0.0);
        }
    }

    #[test]
    fn objective_is_deterministic() {
        let obj = Objective::new(ModelKind::DelayedSShaped, &synthetic(), Metric::Rmse);
        let p = Params::new(123.456, 0.321).unwrap();
        assert_eq!(obj.evaluate(&p).unwrap().to_bits(), obj.evaluate(&p).unwrap().to_bits());
    }

    #[test]
    fn cost_maps_invalid_params_to_infinity() {
        let obj = Objective::new(ModelKind::Power, &synthetic(), Metric::Rmse);
        assert_eq!(obj.cost(&Params { a: -1.0, b: 0.5 }), f64::INFINITY);
        // t^b with huge b overflows
        assert_eq!(obj.cost(&Params { a: 1.0, b: 500.0 }), f64::INFINITY);
    }

    proptest! {
        #[test]
        fn ed_is_sqrt_n_times_rmse(
            pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..500)
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = rmse(&a, &b).unwrap();
            let e = euclidean_distance(&a, &b).unwrap();
            let scaled = r * (a.len() as f64).sqrt();
            prop_assert!((e - scaled).abs() <= 1e-12 * e.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn metrics_are_symmetric(
            pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..100)
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            prop_assert_eq!(rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
            prop_assert_eq!(
                euclidean_distance(&a, &b).unwrap(),
                euclidean_distance(&b, &a).unwrap()
            );
        }
    }
}
