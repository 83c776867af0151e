use std::fmt;

use serde::{Deserialize, Serialize};

use crate::objective::Bounds;

/// Double-precision machine epsilon, the default denominator guard of the weights.
pub const DEFAULT_EPS: f64 = f64::EPSILON;
pub const DEFAULT_PF_MAX: f64 = 0.1;
pub const DEFAULT_NP: usize = 1;

/// Every tunable of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApoConfig {
    /// Population size.
    pub ps: usize,
    pub dim: usize,
    /// Neighbor pairs averaged in the foraging moves.
    pub np: usize,
    /// Ceiling on the fraction of the population sent to dormancy/reproduction.
    pub pf_max: f64,
    pub bounds: Bounds,
    pub max_iterations: usize,
    /// Evaluation budget; checked after each full iteration.
    pub max_fes: Option<u64>,
    pub seed: u64,
    pub eps: f64,
}

impl ApoConfig {
    /// Defaults for everything except the problem shape.
    pub fn new(ps: usize, bounds: Bounds, max_iterations: usize, seed: u64) -> Self {
        Self {
            ps,
            dim: bounds.dim(),
            np: DEFAULT_NP,
            pf_max: DEFAULT_PF_MAX,
            bounds,
            max_iterations,
            max_fes: None,
            seed,
            eps: DEFAULT_EPS,
        }
    }

    #[must_use]
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    #[must_use]
    pub fn with_np(mut self, np: usize) -> Self {
        self.np = np;
        self
    }

    #[must_use]
    pub fn with_pf_max(mut self, pf_max: f64) -> Self {
        self.pf_max = pf_max;
        self
    }

    #[must_use]
    pub fn with_max_fes(mut self, max_fes: Option<u64>) -> Self {
        self.max_fes = max_fes;
        self
    }

    /// Denominator of the iteration ratio used by the cosine schedules.
    ///
    /// Iterations run `0..max_iterations`, so the last one sees ratio 1.
    /// A single-iteration run uses 1 to avoid dividing by zero.
    pub fn iter_max(&self) -> usize {
        self.max_iterations.saturating_sub(1).max(1)
    }

    /// Checks every invariant and reports all that fail.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        if self.ps == 0 {
            violations.push("ps must be at least 1".to_owned());
        }
        if self.dim == 0 {
            violations.push("dim must be at least 1".to_owned());
        }
        if self.dim != self.bounds.dim() {
            violations.push(format!(
                "dim ({}) must match bounds dimension ({})",
                self.dim,
                self.bounds.dim()
            ));
        }
        if self.np == 0 {
            violations.push("np must be at least 1".to_owned());
        } else if self.np > self.ps.saturating_sub(1).max(1) {
            violations.push(format!(
                "np ({}) must not exceed ps - 1 ({})",
                self.np,
                self.ps.saturating_sub(1)
            ));
        }
        if !(self.pf_max > 0.0 && self.pf_max <= 1.0) {
            violations.push(format!("pf_max ({}) must lie in (0, 1]", self.pf_max));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            violations.push(format!("eps ({}) must be positive and finite", self.eps));
        }
        if self.max_fes == Some(0) {
            violations.push("max_fes must be positive when set".to_owned());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}

/// One or more violated configuration invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.violations.join("; "))
    }
}

impl std::error::Error for ConfigError {}
