use serde::{Deserialize, Serialize};

use crate::objective::{ObjectiveError, ObjectiveId};

/// One protozoa: a position and its cached fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub position: Vec<f64>,
    pub fitness: f64,
}

impl Individual {
    /// Evaluates `position` and caches the result.
    pub fn evaluated(position: Vec<f64>, objective: &ObjectiveId) -> Result<Self, ObjectiveError> {
        let fitness = objective.evaluate(&position)?;
        Ok(Self { position, fitness })
    }
}

/// The ranked population plus bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub individuals: Vec<Individual>,
    /// Completed iterations.
    pub iteration: u64,
    /// Objective evaluations spent so far.
    pub fe_count: u64,
    /// Candidates discarded because their fitness was not finite.
    pub nonfinite_rejections: u64,
}

impl Population {
    pub fn new(individuals: Vec<Individual>) -> Self {
        let fe_count = individuals.len() as u64;
        Self {
            individuals,
            iteration: 0,
            fe_count,
            nonfinite_rejections: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// The individual with the lowest fitness; the earliest one on ties.
    pub fn best(&self) -> Option<&Individual> {
        self.individuals
            .iter()
            .reduce(|best, x| if x.fitness < best.fitness { x } else { best })
    }

    pub fn sort_by_fitness(&mut self) {
        sort_by_fitness(&mut self.individuals);
    }
}

/// Stable ascending sort, so equal fitness keeps the previous rank order.
pub fn sort_by_fitness(individuals: &mut [Individual]) {
    individuals.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}
