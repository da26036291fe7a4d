//! Fixtures shared by the criterion benches.

use polariscope_core::abm::SimConfig;
use polariscope_core::{DecisionLogic, EconomicParams, Model, UtilityShape};

/// Group-or-party model at the main-text payoffs in a risk-neutral
/// environment.
pub fn main_text_model() -> Model {
    Model::new(
        DecisionLogic::GroupOrParty,
        EconomicParams::main_text().with_theta(2.0),
        UtilityShape::default(),
    )
    .expect("preset is valid")
}

/// Redistribution run with inequality, at desk scale.
pub fn redistribution_config(n_per_group: usize, events: u64) -> SimConfig {
    let mut econ = EconomicParams::main_text();
    econ.beta = 0.01;
    econ.alpha = 0.5;
    SimConfig {
        n_per_group,
        econ,
        feedback: true,
        events,
        ..SimConfig::default()
    }
}
