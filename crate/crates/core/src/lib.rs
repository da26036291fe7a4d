//! Identity-based interaction model of mass political polarization.
//!
//! * [`utility`]: the S-shaped utility curve.
//! * [`economy`]: payoffs, redistribution, inequality and sorting.
//! * [`interaction`]: decision logics, interaction distributions and expected
//!   utilities.
//! * [`dynamics`]: selection and sorting gradients, equilibria, escape
//!   frequencies.
//! * [`abm`]: the stochastic copying process with mutation and public-goods
//!   feedback.

pub mod abm;
pub mod dynamics;
pub mod economy;
pub mod error;
pub mod interaction;
pub mod strategy;
pub mod utility;

pub use dynamics::{logic_switch_advantage, Equilibrium, GradientSample, Model, Stability};
pub use economy::{
    after_tax_payoff, chi_from_x, group_scaled_benefit, inequality, public_environment, x_from_chi,
    EconomicParams, Group, SortingState,
};
pub use error::ModelError;
pub use interaction::{
    interaction_distribution, mutant_expected_utility, InteractionDistribution, Outcomes, Relation, Stance,
};
pub use strategy::{DecisionLogic, Strategy};
pub use utility::{utility, RiskExtrema, UtilityShape};
