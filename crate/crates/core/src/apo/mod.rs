//! The optimizer's update mathematics and its data types.

mod config;
mod operators;
mod population;

pub use config::{ApoConfig, ConfigError, DEFAULT_EPS, DEFAULT_NP, DEFAULT_PF_MAX};
pub use operators::{
    autotroph_update, decide_operation, dormancy_update, evolve_individual, forage_mask,
    foraging_factor, greedy_select, heterotroph_update, neighbor_weight, p_autotroph_heterotroph,
    p_dormancy_reproduction, pair_neighbors_autotroph, pair_neighbors_heterotroph, partner_rank,
    proportion_fraction, reproduction_mask, reproduction_update, select_dr_indices, Evolved,
    Operation, Selection, UpdateDecision,
};
pub use population::{sort_by_fitness, Individual, Population};
