//! Whom an individual approaches, who accepts, and what that is worth.
//!
//! Every decision logic is expressed through two per-member tables indexed by
//! the target's [`Relation`] to the focal individual:
//!
//! * a *choice weight*: how willing the focal individual is to pursue a
//!   randomly drawn member of that relation, and
//! * an *acceptance* probability: how likely such a member is to agree.
//!
//! The choice weights are multiplied by the population share of each relation
//! and normalized, which gives the interaction distribution. For the
//! one-dimensional logics the tables reproduce the closed-form distributions
//! and mutant utilities term by term; the two-dimensional OR logic applies the
//! same OR construction per identity dimension and collapses onto
//! [`DecisionLogic::GroupOrParty`] when both components are equal.

use serde::{Deserialize, Serialize};

use crate::economy::{after_tax_payoff, EconomicParams, Group};
use crate::error::{check_range, Result};
use crate::strategy::{DecisionLogic, Strategy};
use crate::utility::UtilityShape;

/// Identity of a potential partner relative to the focal individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    InGroupInParty,
    InGroupOutParty,
    OutGroupInParty,
    OutGroupOutParty,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::InGroupInParty,
        Relation::InGroupOutParty,
        Relation::OutGroupInParty,
        Relation::OutGroupOutParty,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn same_group(self) -> bool {
        matches!(self, Relation::InGroupInParty | Relation::InGroupOutParty)
    }

    #[inline]
    pub fn same_party(self) -> bool {
        matches!(self, Relation::InGroupInParty | Relation::OutGroupInParty)
    }

    pub fn from_flags(same_group: bool, same_party: bool) -> Relation {
        match (same_group, same_party) {
            (true, true) => Relation::InGroupInParty,
            (true, false) => Relation::InGroupOutParty,
            (false, true) => Relation::OutGroupInParty,
            (false, false) => Relation::OutGroupOutParty,
        }
    }
}

/// Population share of each relation, seen by an individual whose own group
/// has fraction `x` in the individual's party. Shares are per group, so they
/// sum to two.
#[inline]
pub fn relation_shares(x: f64) -> [f64; 4] {
    [x, 1.0 - x, 1.0 - x, x]
}

/// Normalized distribution over the four target relations, conditional on an
/// interaction being pursued. Indexed by [`Relation::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionDistribution(pub [f64; 4]);

impl InteractionDistribution {
    #[inline]
    pub fn get(&self, rel: Relation) -> f64 {
        self.0[rel.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Probability that the partner belongs to the focal individual's group.
    pub fn in_group(&self) -> f64 {
        self.0[0] + self.0[1]
    }

    /// Normalize per-relation weights. `None` means no interaction is
    /// possible: every weight vanishes.
    pub fn from_weights(weights: [f64; 4]) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return None;
        }
        Some(Self(weights.map(|w| w / total)))
    }
}

/// A decision logic paired with the strategy it is played with.
///
/// One-dimensional strategies store `p` in both components. Components are
/// not range-checked here, which lets finite differences step slightly past
/// the boundaries; construct through [`Stance::new`] for validated input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stance {
    pub logic: DecisionLogic,
    pub group: f64,
    pub party: f64,
}

impl Stance {
    pub fn new(logic: DecisionLogic, strategy: &Strategy) -> Result<Self> {
        strategy.validate_for(logic)?;
        let (group, party) = strategy.components();
        Ok(Self {
            logic,
            group,
            party,
        })
    }

    /// Unchecked one-dimensional stance.
    #[inline]
    pub fn scalar(logic: DecisionLogic, p: f64) -> Self {
        Self {
            logic,
            group: p,
            party: p,
        }
    }

    /// How willing an individual with this stance is to pursue a target of
    /// the given relation.
    #[inline]
    pub fn choice_weight(&self, rel: Relation) -> f64 {
        let p = self.group;
        match self.logic {
            DecisionLogic::GroupOnly => {
                if rel.same_group() {
                    p
                } else {
                    1.0 - p
                }
            }
            DecisionLogic::PartyOnly => {
                if rel.same_party() {
                    p
                } else {
                    1.0 - p
                }
            }
            DecisionLogic::GroupOrParty | DecisionLogic::GroupAndParty => match rel {
                Relation::InGroupInParty => 2.0 * p - p * p,
                Relation::InGroupOutParty | Relation::OutGroupInParty => p + (1.0 - p) * (1.0 - p),
                Relation::OutGroupOutParty => 1.0 - p * p,
            },
            DecisionLogic::TwoDimOr => {
                // pursue unless both dimension checks decline
                let g = if rel.same_group() { self.group } else { 1.0 - self.group };
                let q = if rel.same_party() { self.party } else { 1.0 - self.party };
                1.0 - (1.0 - g) * (1.0 - q)
            }
        }
    }

    /// Probability that an individual with this stance accepts an approach
    /// from someone of the given relation.
    #[inline]
    pub fn acceptance(&self, rel: Relation) -> f64 {
        let p = self.group;
        match self.logic {
            DecisionLogic::GroupOnly => {
                if rel.same_group() {
                    1.0
                } else {
                    1.0 - p
                }
            }
            DecisionLogic::PartyOnly => {
                if rel.same_party() {
                    1.0
                } else {
                    1.0 - p
                }
            }
            DecisionLogic::GroupOrParty => match rel {
                Relation::InGroupInParty => 1.0,
                Relation::InGroupOutParty | Relation::OutGroupInParty => 1.0 - p,
                Relation::OutGroupOutParty => 1.0 - p * p,
            },
            DecisionLogic::GroupAndParty => match rel {
                Relation::InGroupInParty => 1.0,
                Relation::InGroupOutParty | Relation::OutGroupInParty => 1.0 - p,
                Relation::OutGroupOutParty => (1.0 - p) * (1.0 - p),
            },
            DecisionLogic::TwoDimOr => match rel {
                Relation::InGroupInParty => 1.0,
                Relation::InGroupOutParty => 1.0 - self.party,
                Relation::OutGroupInParty => 1.0 - self.group,
                Relation::OutGroupOutParty => 1.0 - self.group * self.party,
            },
        }
    }

    pub fn acceptance_profile(&self) -> [f64; 4] {
        Relation::ALL.map(|rel| self.acceptance(rel))
    }

    /// Interaction distribution against the given relation shares.
    pub fn distribution(&self, shares: &[f64; 4]) -> Option<InteractionDistribution> {
        let weights = Relation::ALL.map(|rel| self.choice_weight(rel) * shares[rel.index()]);
        InteractionDistribution::from_weights(weights)
    }
}

/// Interaction distribution of an individual in party-aligned position with
/// sorting fraction `x`. `Ok(None)` is the "no interaction possible" marker.
pub fn interaction_distribution(
    logic: DecisionLogic,
    strategy: &Strategy,
    x: f64,
) -> Result<Option<InteractionDistribution>> {
    check_range("x", x, 0.0, 1.0, "0 <= x <= 1")?;
    Ok(Stance::new(logic, strategy)?.distribution(&relation_shares(x)))
}

/// Utilities of the possible outcomes of one interaction attempt for a
/// member of a particular group at a particular environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcomes {
    pub success_in: f64,
    pub success_out: f64,
    /// Failure, refusal, or no interaction at all.
    pub baseline: f64,
    pub q_in: f64,
    pub q_out: f64,
    /// Gross (pre-tax) benefits, used for the public good.
    pub gross_in: f64,
    pub gross_out: f64,
}

impl Outcomes {
    pub fn new(econ: &EconomicParams, shape: &UtilityShape, group: Group, theta: f64) -> Self {
        let (gross_in, gross_out) = econ.scaled_benefits(group);
        Self {
            success_in: shape.eval(after_tax_payoff(gross_in, econ.alpha, theta)),
            success_out: shape.eval(after_tax_payoff(gross_out, econ.alpha, theta)),
            baseline: shape.eval(after_tax_payoff(0.0, econ.alpha, theta)),
            q_in: econ.success_in,
            q_out: econ.success_out,
            gross_in,
            gross_out,
        }
    }

    #[inline]
    fn for_relation(&self, rel: Relation) -> (f64, f64) {
        if rel.same_group() {
            (self.q_in, self.success_in)
        } else {
            (self.q_out, self.success_out)
        }
    }

    /// Expected utility of one interaction attempt given the distribution
    /// and the per-relation acceptance probabilities of the partners.
    #[inline]
    pub fn expected_utility(
        &self,
        dist: Option<&InteractionDistribution>,
        acceptance: &[f64; 4],
    ) -> f64 {
        let Some(dist) = dist else {
            return self.baseline;
        };
        Relation::ALL
            .iter()
            .map(|&rel| {
                let pi = dist.get(rel);
                let (q, success) = self.for_relation(rel);
                let won = acceptance[rel.index()] * q;
                pi * won * success + pi * (1.0 - won) * self.baseline
            })
            .sum()
    }

    /// Expected gross benefit of one interaction attempt.
    #[inline]
    pub fn expected_gross_benefit(
        &self,
        dist: Option<&InteractionDistribution>,
        acceptance: &[f64; 4],
    ) -> f64 {
        let Some(dist) = dist else {
            return 0.0;
        };
        Relation::ALL
            .iter()
            .map(|&rel| {
                let gross = if rel.same_group() { self.gross_in } else { self.gross_out };
                let q = if rel.same_group() { self.q_in } else { self.q_out };
                dist.get(rel) * acceptance[rel.index()] * q * gross
            })
            .sum()
    }
}

/// Expected utility of a rare mutant in a monomorphic resident population.
///
/// The mutant belongs to the scaled group (group one), sits in the party where
/// its group has fraction `x`, and experiences the fixed environment
/// `econ.theta`.
pub fn mutant_expected_utility(
    logic: DecisionLogic,
    mutant: &Strategy,
    resident: &Strategy,
    x: f64,
    econ: &EconomicParams,
    shape: &UtilityShape,
) -> Result<f64> {
    check_range("x", x, 0.0, 1.0, "0 <= x <= 1")?;
    let chooser = Stance::new(logic, mutant)?;
    let responder = Stance::new(logic, resident)?;
    let outcomes = Outcomes::new(econ, shape, Group::One, econ.theta);
    Ok(utility_against(&chooser, &responder, x, &outcomes))
}

/// Unchecked core of the mutant utility: `chooser` approaches a population
/// whose members all respond like `responder`.
#[inline]
pub fn utility_against(chooser: &Stance, responder: &Stance, x: f64, outcomes: &Outcomes) -> f64 {
    let dist = chooser.distribution(&relation_shares(x));
    outcomes.expected_utility(dist.as_ref(), &responder.acceptance_profile())
}

/// Unchecked expected gross benefit of `chooser` against `responder`.
#[inline]
pub fn gross_benefit_against(chooser: &Stance, responder: &Stance, x: f64, outcomes: &Outcomes) -> f64 {
    let dist = chooser.distribution(&relation_shares(x));
    outcomes.expected_gross_benefit(dist.as_ref(), &responder.acceptance_profile())
}
