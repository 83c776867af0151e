//! Objective functions and search-box bounds.
//!
//! The benchmark set is the basic (unshifted, unrotated) form of each function,
//! all to be minimized:
//!
//! | id                          | f(x)                                                          | optimum      |
//! |-----------------------------|---------------------------------------------------------------|--------------|
//! | `sphere`                    | Σ xᵢ²                                                         | 0            |
//! | `bent_cigar`                | x₁² + 10⁶ Σ_{i≥2} xᵢ²                                         | 0            |
//! | `high_conditioned_elliptic` | Σ (10⁶)^((i−1)/(D−1)) xᵢ²                                     | 0            |
//! | `hgbat`                     | \|(Σxᵢ²)² − (Σxᵢ)²\|^½ + (½Σxᵢ² + Σxᵢ)/D + ½                  | (−1, …, −1)  |
//! | `rosenbrock`                | Σ_{i<D} [100(xᵢ₊₁ − xᵢ²)² + (xᵢ − 1)²]                        | (1, …, 1)    |
//! | `griewank`                  | 1 + Σ xᵢ²/4000 − Π cos(xᵢ/√i)                                 | 0            |
//!
//! Sums run left to right in index order. The parallel engine relies on
//! evaluation being a deterministic function of the input bits.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("{function} needs at least {min} dimensions, got {got}")]
    TooFewDimensions {
        function: String,
        min: usize,
        got: usize,
    },
    #[error("component {index} is not finite ({value})")]
    NonFiniteInput { index: usize, value: f64 },
    #[error("unknown function `{0}`; valid ids: {valid}", valid = Benchmark::ID_LIST)]
    UnknownFunction(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("lower bound {lower} must be below upper bound {upper}")]
    Inverted { lower: f64, upper: f64 },
    #[error("bounds must be finite")]
    NonFinite,
    #[error("dimension must be at least 1")]
    ZeroDimension,
}

/// Uniform box `[lower, upper]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: f64,
    upper: f64,
    dim: usize,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64, dim: usize) -> Result<Self, BoundsError> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(BoundsError::NonFinite);
        }
        if lower >= upper {
            return Err(BoundsError::Inverted { lower, upper });
        }
        if dim == 0 {
            return Err(BoundsError::ZeroDimension);
        }
        Ok(Self { lower, upper, dim })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|&v| v >= self.lower && v <= self.upper)
    }

    /// Projects `x` onto the box in place.
    pub fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for v in x {
            *v = v.max(self.lower).min(self.upper);
        }
    }
}

/// Componentwise `min(max(xⱼ, lower), upper)`.
pub fn clamp(x: &[f64], bounds: &Bounds) -> Vec<f64> {
    let mut out = x.to_vec();
    bounds.clamp_in_place(&mut out);
    out
}

/// The built-in benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Sphere,
    BentCigar,
    HighConditionedElliptic,
    Hgbat,
    Rosenbrock,
    Griewank,
}

impl Benchmark {
    pub const ALL: [Benchmark; 6] = [
        Benchmark::Sphere,
        Benchmark::BentCigar,
        Benchmark::HighConditionedElliptic,
        Benchmark::Hgbat,
        Benchmark::Rosenbrock,
        Benchmark::Griewank,
    ];

    const ID_LIST: &'static str =
        "sphere, bent_cigar, high_conditioned_elliptic, hgbat, rosenbrock, griewank";

    pub fn id(self) -> &'static str {
        match self {
            Benchmark::Sphere => "sphere",
            Benchmark::BentCigar => "bent_cigar",
            Benchmark::HighConditionedElliptic => "high_conditioned_elliptic",
            Benchmark::Hgbat => "hgbat",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::Griewank => "griewank",
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            Benchmark::HighConditionedElliptic | Benchmark::Hgbat | Benchmark::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// The global minimizer in `dim` dimensions; the function value there is 0.
    pub fn optimum(self, dim: usize) -> Vec<f64> {
        match self {
            Benchmark::Hgbat => vec![-1.0; dim],
            Benchmark::Rosenbrock => vec![1.0; dim],
            _ => vec![0.0; dim],
        }
    }

    /// Evaluates without input validation. Callers go through [`ObjectiveId::evaluate`].
    fn raw(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Sphere => x.iter().map(|v| v * v).sum(),
            Benchmark::BentCigar => {
                let tail: f64 = x[1..].iter().map(|v| v * v).sum();
                x[0] * x[0] + 1e6 * tail
            }
            Benchmark::HighConditionedElliptic => {
                let denom = (x.len() - 1) as f64;
                x.iter()
                    .enumerate()
                    .map(|(i, v)| 1e6f64.powf(i as f64 / denom) * v * v)
                    .sum()
            }
            Benchmark::Hgbat => {
                let d = x.len() as f64;
                let sum_sq: f64 = x.iter().map(|v| v * v).sum();
                let sum: f64 = x.iter().sum();
                (sum_sq * sum_sq - sum * sum).abs().sqrt() + (0.5 * sum_sq + sum) / d + 0.5
            }
            Benchmark::Rosenbrock => x
                .windows(2)
                .map(|w| {
                    let a = w[1] - w[0] * w[0];
                    let b = w[0] - 1.0;
                    100.0 * a * a + b * b
                })
                .sum(),
            Benchmark::Griewank => {
                let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + sum - prod
            }
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Benchmark {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.id() == s)
            .ok_or_else(|| ObjectiveError::UnknownFunction(s.to_owned()))
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied evaluator.
#[derive(Clone)]
pub struct External {
    name: String,
    min_dim: usize,
    eval: Arc<EvalFn>,
}

impl External {
    pub fn new(
        name: impl Into<String>,
        min_dim: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            min_dim: min_dim.max(1),
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for External {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("External")
            .field("name", &self.name)
            .field("min_dim", &self.min_dim)
            .finish_non_exhaustive()
    }
}

/// What the optimizer minimizes.
#[derive(Debug, Clone)]
pub enum ObjectiveId {
    Benchmark(Benchmark),
    External(External),
}

impl ObjectiveId {
    pub fn name(&self) -> &str {
        match self {
            ObjectiveId::Benchmark(b) => b.id(),
            ObjectiveId::External(e) => &e.name,
        }
    }

    pub fn min_dim(&self) -> usize {
        match self {
            ObjectiveId::Benchmark(b) => b.min_dim(),
            ObjectiveId::External(e) => e.min_dim,
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), ObjectiveError> {
        let min = self.min_dim();
        if dim < min {
            return Err(ObjectiveError::TooFewDimensions {
                function: self.name().to_owned(),
                min,
                got: dim,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, ObjectiveError> {
        self.check_dim(x.len())?;
        if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ObjectiveError::NonFiniteInput { index, value });
        }
        Ok(match self {
            ObjectiveId::Benchmark(b) => b.raw(x),
            ObjectiveId::External(e) => (e.eval)(x),
        })
    }
}

impl From<Benchmark> for ObjectiveId {
    fn from(b: Benchmark) -> Self {
        ObjectiveId::Benchmark(b)
    }
}

impl FromStr for ObjectiveId {
    type Err = ObjectiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Benchmark>().map(ObjectiveId::Benchmark)
    }
}

/// Evaluates a benchmark by id.
pub fn evaluate(id: &ObjectiveId, x: &[f64]) -> Result<f64, ObjectiveError> {
    id.evaluate(x)
}
