use serde::{Deserialize, Serialize};

use super::SimError;
use crate::economy::{x_from_chi, EconomicParams};
use crate::error::check_range;
use crate::strategy::{DecisionLogic, Strategy};
use crate::utility::UtilityShape;

/// Starting strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    Uniform(Strategy),
    /// In every (group, party) class the first `round(fraction·size)`
    /// members play `minority`, everyone else plays `majority`.
    Mixed {
        fraction: f64,
        minority: Strategy,
        majority: Strategy,
    },
}

/// Parameters of one simulated population and of its replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_per_group: usize,
    pub logic: DecisionLogic,
    pub econ: EconomicParams,
    pub shape: UtilityShape,
    /// Fixed sorting.
    pub chi: f64,
    /// Recompute the environment from the public good after each event;
    /// otherwise `econ.theta` is used throughout.
    pub feedback: bool,
    /// Selection strength σ.
    pub selection: f64,
    /// Probability μ that an event also mutates someone.
    pub mutation_rate: f64,
    /// Mutation step Δ.
    pub mutation_size: f64,
    pub initial: InitialCondition,
    /// Number of copying events per trajectory.
    pub events: u64,
    pub seed: u64,
    pub replicates: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_per_group: 1000,
            logic: DecisionLogic::GroupOrParty,
            econ: EconomicParams::main_text(),
            shape: UtilityShape::default(),
            chi: 1.0,
            feedback: false,
            selection: 10.0,
            mutation_rate: 1e-3,
            mutation_size: 0.01,
            initial: InitialCondition::Uniform(Strategy::Scalar(0.0)),
            events: 100_000,
            seed: 0,
            replicates: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_per_group < 2 {
            return Err(SimError::Config(format!(
                "need at least 2 individuals per group, got {}",
                self.n_per_group
            )));
        }
        self.econ.validate()?;
        self.shape.validate()?;
        x_from_chi(self.chi)?;
        check_range("sigma", self.selection, 0.0, f64::MAX, "sigma >= 0")?;
        check_range("mu", self.mutation_rate, 0.0, 1.0, "0 <= mu <= 1")?;
        if !(self.mutation_size > 0.0 && self.mutation_size.is_finite()) {
            return Err(SimError::Config(format!(
                "mutation size must be positive, got {}",
                self.mutation_size
            )));
        }
        if self.events < 1 {
            return Err(SimError::Config("event budget must be at least 1".into()));
        }
        if self.replicates < 1 {
            return Err(SimError::Config("need at least one replicate".into()));
        }
        match self.initial {
            InitialCondition::Uniform(s) => s.validate_for(self.logic)?,
            InitialCondition::Mixed {
                fraction,
                minority,
                majority,
            } => {
                check_range("fraction", fraction, 0.0, 1.0, "0 <= fraction <= 1")?;
                minority.validate_for(self.logic)?;
                majority.validate_for(self.logic)?;
            }
        }
        Ok(())
    }

    /// Events between recorded samples.
    pub fn sample_interval(&self) -> u64 {
        self.n_per_group as u64
    }
}
