use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, ModelError, Result};

/// Rule an individual uses to decide whom to approach and whom to accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionLogic {
    /// Only the identity group is salient.
    GroupOnly,
    /// Only the party is salient.
    PartyOnly,
    /// A target is "in" when it shares the group or the party.
    GroupOrParty,
    /// A target is "in" only when it shares both the group and the party.
    GroupAndParty,
    /// OR logic with separate willingness on each identity dimension.
    TwoDimOr,
}

impl DecisionLogic {
    pub const ALL: [DecisionLogic; 5] = [
        DecisionLogic::GroupOnly,
        DecisionLogic::PartyOnly,
        DecisionLogic::GroupOrParty,
        DecisionLogic::GroupAndParty,
        DecisionLogic::TwoDimOr,
    ];

    /// Whether strategies under this logic carry two components.
    pub fn is_two_dimensional(self) -> bool {
        matches!(self, DecisionLogic::TwoDimOr)
    }

    pub fn name(self) -> &'static str {
        match self {
            DecisionLogic::GroupOnly => "group-only",
            DecisionLogic::PartyOnly => "party-only",
            DecisionLogic::GroupOrParty => "group-or-party",
            DecisionLogic::GroupAndParty => "group-and-party",
            DecisionLogic::TwoDimOr => "two-dim-or",
        }
    }
}

impl fmt::Display for DecisionLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecisionLogic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        DecisionLogic::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown decision logic `{s}`"))
    }
}

/// An interaction strategy.
///
/// `Scalar(p)` is the probability of favouring "in" targets. `TwoDim` holds
/// separate probabilities for the group and the party dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Scalar(f64),
    TwoDim { group: f64, party: f64 },
}

impl Strategy {
    pub fn scalar(p: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0, "0 <= p <= 1")?;
        Ok(Strategy::Scalar(p))
    }

    pub fn two_dim(group: f64, party: f64) -> Result<Self> {
        check_range("p_g", group, 0.0, 1.0, "0 <= p_g <= 1")?;
        check_range("p_p", party, 0.0, 1.0, "0 <= p_p <= 1")?;
        Ok(Strategy::TwoDim { group, party })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Strategy::Scalar(p) => check_range("p", p, 0.0, 1.0, "0 <= p <= 1"),
            Strategy::TwoDim { group, party } => {
                check_range("p_g", group, 0.0, 1.0, "0 <= p_g <= 1")?;
                check_range("p_p", party, 0.0, 1.0, "0 <= p_p <= 1")
            }
        }
    }

    /// Check that the strategy is valid and has the dimension `logic` needs.
    pub fn validate_for(&self, logic: DecisionLogic) -> Result<()> {
        self.validate()?;
        match (logic.is_two_dimensional(), self) {
            (false, Strategy::Scalar(_)) | (true, Strategy::TwoDim { .. }) => Ok(()),
            (false, _) => Err(ModelError::StrategyDimension {
                logic,
                expected: "one-dimensional",
            }),
            (true, _) => Err(ModelError::StrategyDimension {
                logic,
                expected: "two-dimensional",
            }),
        }
    }

    /// `(group, party)` components; a scalar strategy uses `p` for both.
    #[inline]
    pub fn components(&self) -> (f64, f64) {
        match *self {
            Strategy::Scalar(p) => (p, p),
            Strategy::TwoDim { group, party } => (group, party),
        }
    }

    /// The headline polarization value: `p`, or `p_g` for two-dimensional
    /// strategies.
    #[inline]
    pub fn primary(&self) -> f64 {
        self.components().0
    }
}
