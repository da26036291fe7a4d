//! Payoffs, public-goods redistribution and inequality.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, ModelError, Result};

/// One of the two fixed identity groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    One,
    Two,
}

impl Group {
    pub fn index(self) -> usize {
        match self {
            Group::One => 0,
            Group::Two => 1,
        }
    }

    pub fn other(self) -> Group {
        match self {
            Group::One => Group::Two,
            Group::Two => Group::One,
        }
    }
}

/// Benefits, risks and the economic environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    /// Benefit of a successful in-group interaction.
    pub benefit_in: f64,
    /// Benefit of a successful out-group interaction.
    pub benefit_out: f64,
    /// Success probability of an in-group interaction.
    pub success_in: f64,
    /// Success probability of an out-group interaction.
    pub success_out: f64,
    /// Environment offset used when redistribution feedback is off.
    pub theta: f64,
    /// Redistribution (tax) rate.
    pub alpha: f64,
    /// Deadweight loss of taxation.
    pub gamma: f64,
    /// Public-goods multiplier.
    pub multiplier: f64,
    /// Baseline environment subtracted from the public good.
    pub theta0: f64,
    /// Inequality share: the scaled group receives `2β·B`, the other `2(1-β)·B`.
    pub beta: f64,
    /// Which group receives the `2β` share.
    pub scaled_group: Group,
}

impl EconomicParams {
    /// Default payoffs (`B_I = 1`, `B_O = 2`).
    pub fn main_text() -> Self {
        Self {
            benefit_in: 1.0,
            benefit_out: 2.0,
            success_in: 1.0,
            success_out: 0.6,
            theta: 0.0,
            alpha: 0.0,
            gamma: 0.0,
            multiplier: 1.0,
            theta0: 0.5,
            beta: 0.5,
            scaled_group: Group::One,
        }
    }

    /// Halved benefits (`B_I = 0.5`, `B_O = 1`).
    pub fn si() -> Self {
        Self {
            benefit_in: 0.5,
            benefit_out: 1.0,
            ..Self::main_text()
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_range("q_I", self.success_in, 0.0, 1.0, "0 <= q_I <= 1")?;
        check_range("q_O", self.success_out, 0.0, 1.0, "0 <= q_O <= 1")?;
        if self.success_out >= self.success_in {
            return Err(ModelError::Economy(
                "out-group interactions must be riskier (q_O < q_I)",
            ));
        }
        check_range("B_I", self.benefit_in, 0.0, f64::MAX, "B_I >= 0")?;
        check_range("B_O", self.benefit_out, 0.0, f64::MAX, "B_O >= 0")?;
        if self.success_in * self.benefit_in >= self.success_out * self.benefit_out {
            return Err(ModelError::Economy(
                "out-group interactions must pay more on average (q_I*B_I < q_O*B_O)",
            ));
        }
        check_range("theta", self.theta, f64::MIN, f64::MAX, "finite")?;
        check_range("alpha", self.alpha, 0.0, 1.0, "0 <= alpha <= 1")?;
        check_range("gamma", self.gamma, 0.0, 1.0, "0 <= gamma <= 1")?;
        check_range("r", self.multiplier, 1.0, f64::MAX, "r >= 1")?;
        check_range("theta0", self.theta0, f64::MIN, f64::MAX, "finite")?;
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ModelError::OutOfRange {
                field: "beta",
                value: self.beta,
                expected: "0 < beta < 1",
            });
        }
        Ok(())
    }

    /// Multiplier applied to every benefit received by `group`.
    #[inline]
    pub fn benefit_scale(&self, group: Group) -> f64 {
        if group == self.scaled_group {
            2.0 * self.beta
        } else {
            2.0 * (1.0 - self.beta)
        }
    }

    /// `(in-group, out-group)` gross benefits for a member of `group`.
    #[inline]
    pub fn scaled_benefits(&self, group: Group) -> (f64, f64) {
        let s = self.benefit_scale(group);
        (s * self.benefit_in, s * self.benefit_out)
    }

    /// The group with the larger benefit share, if the shares differ.
    pub fn richer_group(&self) -> Option<Group> {
        if self.beta < 0.5 {
            Some(self.scaled_group.other())
        } else if self.beta > 0.5 {
            Some(self.scaled_group)
        } else {
            None
        }
    }

    /// Environment produced by the public good when the mean gross benefit
    /// per interaction attempt is `mean_benefit`.
    #[inline]
    pub fn public_environment(&self, mean_benefit: f64) -> f64 {
        public_environment(self.alpha, self.gamma, self.multiplier, mean_benefit, self.theta0)
    }
}

/// `θ = α(1 - γα)·r·B̄ - θ0`.
#[inline]
pub fn public_environment(alpha: f64, gamma: f64, r: f64, mean_benefit: f64, theta0: f64) -> f64 {
    alpha * (1.0 - gamma * alpha) * r * mean_benefit - theta0
}

/// Payoff kept after taxation at rate `alpha`, plus the shared environment.
#[inline]
pub fn after_tax_payoff(gross: f64, alpha: f64, theta: f64) -> f64 {
    (1.0 - alpha) * gross + theta
}

/// Benefit received by `group` when group one is the `2β`-scaled group.
#[inline]
pub fn group_scaled_benefit(benefit: f64, beta: f64, group: Group) -> f64 {
    match group {
        Group::One => 2.0 * beta * benefit,
        Group::Two => 2.0 * (1.0 - beta) * benefit,
    }
}

/// Relative utility gap `(w_high - w_low) / (w_high + w_low)`; zero when both
/// utilities vanish.
pub fn inequality(w_high: f64, w_low: f64) -> f64 {
    let total = w_high + w_low;
    if total == 0.0 {
        0.0
    } else {
        (w_high - w_low) / total
    }
}

/// Degree of sorting `χ = 2x - 1` from the fraction `x` of group one in
/// party one.
pub fn chi_from_x(x: f64) -> Result<f64> {
    check_range("x", x, 0.0, 1.0, "0 <= x <= 1")?;
    Ok(2.0 * x - 1.0)
}

/// Inverse of [`chi_from_x`].
pub fn x_from_chi(chi: f64) -> Result<f64> {
    check_range("chi", chi, -1.0, 1.0, "-1 <= chi <= 1")?;
    Ok((1.0 + chi) / 2.0)
}

/// Sorting expressed both as `χ` and as `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortingState {
    pub chi: f64,
    pub x: f64,
}

impl SortingState {
    pub fn from_chi(chi: f64) -> Result<Self> {
        Ok(Self {
            chi,
            x: x_from_chi(chi)?,
        })
    }

    pub fn from_x(x: f64) -> Result<Self> {
        Ok(Self {
            chi: chi_from_x(x)?,
            x,
        })
    }
}
