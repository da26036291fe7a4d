//! Stochastic copying process on a finite population.
//!
//! Two identity groups of `N` members each are split across two parties at a
//! fixed sorting. Each event draws a focal individual and a model, and the
//! focal individual imitates the model with a logistic probability in their
//! utility difference. Mutation nudges a random strategy by `±Δ`. With
//! redistribution feedback on, the environment is recomputed from the mean
//! expected gross benefit after every event.
//!
//! Utilities are expected utilities under the current composition. Partners'
//! acceptance enters through per-class sums of each member's acceptance
//! probability, so a heterogeneous population is handled exactly and each
//! event costs O(1).

mod config;
mod population;
mod run;

pub use config::{InitialCondition, SimConfig};
pub use population::{copy_probability, Individual, Party, Population, Snapshot};
pub use run::{
    replicate_rng, run_ensemble, run_trajectory, EnsembleResult, EnsembleSummary, Estimate, Sample,
    TrajectoryRecord,
};

use thiserror::Error;

use crate::error::ModelError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("non-finite utility {value} for individual {individual} at event {event}")]
    NonFinite {
        event: u64,
        individual: usize,
        value: f64,
        snapshot: Box<Snapshot>,
    },
}
