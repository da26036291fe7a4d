//! Adaptive dynamics of monomorphic populations.
//!
//! A rare mutant playing `p_i` in a resident population at `p` sees the
//! utilities of [`crate::interaction`]. Averaging a group member's utility
//! over its two possible parties gives
//!
//! ```text
//! W(p_i; p, x) = x·w(p_i; x) + (1 - x)·w(p_i; 1 - x)
//! ```
//!
//! and the selection gradient is `∂W/∂p_i` at `p_i = p`; the sorting gradient
//! is `∂W/∂x` with the whole population at `p`. When the two groups receive
//! different benefit shares, `W` is averaged over both groups. Derivatives are
//! central finite differences.
//!
//! With redistribution feedback on, the environment is the public good
//! generated by the resident population. A rare mutant does not move it, so
//! the selection gradient holds it fixed, while the sorting gradient lets it
//! follow `x` because a change in sorting concerns everyone.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::economy::{x_from_chi, EconomicParams, Group};
use crate::error::{check_range, ModelError, Result};
use crate::interaction::{gross_benefit_against, utility_against, Outcomes, Stance};
use crate::strategy::DecisionLogic;
use crate::utility::UtilityShape;

/// Finite-difference step used by the gradients.
pub const GRADIENT_STEP: f64 = 1e-6;

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-8;

/// Gradients smaller than this are finite-difference noise and count as zero
/// when classifying equilibria.
pub const GRADIENT_FLOOR: f64 = 1e-9;

/// Grid used by [`Model::escape_frequency`].
pub const ESCAPE_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientSample {
    pub p: f64,
    pub chi: f64,
    pub s_p: f64,
    pub s_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

/// A fixed point of the one-dimensional selection dynamics at fixed sorting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub p_star: f64,
    pub stability: Stability,
    /// Interval attracted to `p_star`; degenerate for unstable points.
    pub basin: (f64, f64),
}

/// A decision logic in a given economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub logic: DecisionLogic,
    pub econ: EconomicParams,
    pub shape: UtilityShape,
    /// Derive the environment from the public good instead of `econ.theta`.
    pub feedback: bool,
}

impl Model {
    pub fn new(logic: DecisionLogic, econ: EconomicParams, shape: UtilityShape) -> Result<Self> {
        econ.validate()?;
        shape.validate()?;
        Ok(Self {
            logic,
            econ,
            shape,
            feedback: false,
        })
    }

    pub fn with_feedback(mut self, feedback: bool) -> Self {
        self.feedback = feedback;
        self
    }

    /// Environment of a monomorphic population playing `resident` at sorting
    /// fraction `x`.
    pub fn environment(&self, resident: &Stance, x: f64) -> f64 {
        if !self.feedback {
            return self.econ.theta;
        }
        let mut total = 0.0;
        for group in [Group::One, Group::Two] {
            let out = Outcomes::new(&self.econ, &self.shape, group, 0.0);
            total += x * gross_benefit_against(resident, resident, x, &out)
                + (1.0 - x) * gross_benefit_against(resident, resident, 1.0 - x, &out);
        }
        self.econ.public_environment(total / 2.0)
    }

    /// Party-averaged utility of `chooser`, averaged over both groups.
    pub fn mean_utility(&self, chooser: &Stance, resident: &Stance, x: f64, theta: f64) -> f64 {
        group_average(&self.econ, &self.shape, theta, chooser, resident, x)
    }

    fn check_scalar(&self, p: f64, chi: f64) -> Result<f64> {
        if self.logic.is_two_dimensional() {
            return Err(ModelError::StrategyDimension {
                logic: self.logic,
                expected: "one-dimensional",
            });
        }
        check_range("p", p, 0.0, 1.0, "0 <= p <= 1")?;
        x_from_chi(chi)
    }

    pub fn selection_gradient(&self, p: f64, chi: f64) -> Result<f64> {
        let x = self.check_scalar(p, chi)?;
        Ok(self.selection_gradient_at(p, x, GRADIENT_STEP))
    }

    pub fn sorting_gradient(&self, p: f64, chi: f64) -> Result<f64> {
        let x = self.check_scalar(p, chi)?;
        Ok(self.sorting_gradient_at(p, x, GRADIENT_STEP))
    }

    /// Unchecked selection gradient at sorting fraction `x` with a chosen
    /// finite-difference step.
    pub fn selection_gradient_at(&self, p: f64, x: f64, step: f64) -> f64 {
        let resident = Stance::scalar(self.logic, p);
        let theta = self.environment(&resident, x);
        let up = self.mean_utility(&Stance::scalar(self.logic, p + step), &resident, x, theta);
        let down = self.mean_utility(&Stance::scalar(self.logic, p - step), &resident, x, theta);
        (up - down) / (2.0 * step)
    }

    /// Unchecked sorting gradient at sorting fraction `x`.
    pub fn sorting_gradient_at(&self, p: f64, x: f64, step: f64) -> f64 {
        let resident = Stance::scalar(self.logic, p);
        let population = |x: f64| {
            let theta = self.environment(&resident, x);
            self.mean_utility(&resident, &resident, x, theta)
        };
        (population(x + step) - population(x - step)) / (2.0 * step)
    }

    /// `(∂W/∂p_g, ∂W/∂p_p)` for the two-dimensional OR logic.
    pub fn selection_gradient_2d(&self, p_g: f64, p_p: f64, chi: f64) -> Result<(f64, f64)> {
        if !self.logic.is_two_dimensional() {
            return Err(ModelError::StrategyDimension {
                logic: self.logic,
                expected: "two-dimensional",
            });
        }
        check_range("p_g", p_g, 0.0, 1.0, "0 <= p_g <= 1")?;
        check_range("p_p", p_p, 0.0, 1.0, "0 <= p_p <= 1")?;
        let x = x_from_chi(chi)?;
        let stance = |g, q| Stance {
            logic: self.logic,
            group: g,
            party: q,
        };
        let resident = stance(p_g, p_p);
        let theta = self.environment(&resident, x);
        let h = GRADIENT_STEP;
        let w = |chooser: Stance| self.mean_utility(&chooser, &resident, x, theta);
        let d_group = (w(stance(p_g + h, p_p)) - w(stance(p_g - h, p_p))) / (2.0 * h);
        let d_party = (w(stance(p_g, p_p + h)) - w(stance(p_g, p_p - h))) / (2.0 * h);
        Ok((d_group, d_party))
    }

    /// Both gradients on a `p_resolution × chi_resolution` grid, ordered by
    /// `chi` then `p`.
    pub fn phase_portrait(&self, p_resolution: usize, chi_resolution: usize) -> Result<Vec<GradientSample>> {
        for (field, value) in [("p_resolution", p_resolution), ("chi_resolution", chi_resolution)] {
            if value < 2 {
                return Err(ModelError::Resolution { field, value, min: 2 });
            }
        }
        self.check_scalar(0.0, 0.0)?;
        let cells: Vec<(f64, f64)> = (0..chi_resolution)
            .flat_map(|c| {
                let chi = -1.0 + 2.0 * c as f64 / (chi_resolution - 1) as f64;
                (0..p_resolution).map(move |k| (k as f64 / (p_resolution - 1) as f64, chi))
            })
            .collect();
        Ok(cells
            .into_par_iter()
            .map(|(p, chi)| {
                let x = (1.0 + chi) / 2.0;
                GradientSample {
                    p,
                    chi,
                    s_p: self.selection_gradient_at(p, x, GRADIENT_STEP),
                    s_x: self.sorting_gradient_at(p, x, GRADIENT_STEP),
                }
            })
            .collect())
    }

    /// Fixed points of the selection dynamics at sorting `chi`, in increasing
    /// order of `p`. Boundaries are reported whenever the gradient points
    /// toward or away from them, so stability alternates along the list.
    pub fn find_equilibria(&self, chi: f64, grid_n: usize) -> Result<Vec<Equilibrium>> {
        if grid_n < 64 {
            return Err(ModelError::Resolution {
                field: "grid_n",
                value: grid_n,
                min: 64,
            });
        }
        let x = self.check_scalar(0.0, chi)?;
        let grad = |p: f64| self.selection_gradient_at(p, x, GRADIENT_STEP);
        let grid: Vec<f64> = (0..grid_n).map(|k| k as f64 / (grid_n - 1) as f64).collect();
        let values: Vec<f64> = grid.par_iter().map(|&p| grad(p)).collect();
        let signs: Vec<i8> = values
            .iter()
            .map(|&v| (v > GRADIENT_FLOOR) as i8 - (v < -GRADIENT_FLOOR) as i8)
            .collect();

        let mut points: Vec<(f64, Stability)> = Vec::new();
        let lower = if signs[0] != 0 { signs[0] } else { signs[1] };
        match lower {
            -1 => points.push((0.0, Stability::Stable)),
            1 => points.push((0.0, Stability::Unstable)),
            _ => {}
        }
        for k in 0..grid_n - 1 {
            let (a, b) = (signs[k], signs[k + 1]);
            if a * b < 0 {
                let root = bisect(&grad, grid[k], grid[k + 1], values[k]);
                points.push((root, if a > 0 { Stability::Stable } else { Stability::Unstable }));
            } else if b == 0 && a != 0 && k + 2 < grid_n && a * signs[k + 2] < 0 {
                // root on an interior grid node
                points.push((grid[k + 1], if a > 0 { Stability::Stable } else { Stability::Unstable }));
            }
        }
        let upper = if signs[grid_n - 1] != 0 {
            signs[grid_n - 1]
        } else {
            signs[grid_n - 2]
        };
        match upper {
            1 => points.push((1.0, Stability::Stable)),
            -1 => points.push((1.0, Stability::Unstable)),
            _ => {}
        }

        let mut out = Vec::with_capacity(points.len());
        for (k, &(p_star, stability)) in points.iter().enumerate() {
            let basin = match stability {
                Stability::Unstable => (p_star, p_star),
                Stability::Stable => {
                    let lo = points[..k]
                        .iter()
                        .rev()
                        .find(|e| e.1 == Stability::Unstable)
                        .map_or(0.0, |e| e.0);
                    let hi = points[k + 1..]
                        .iter()
                        .find(|e| e.1 == Stability::Unstable)
                        .map_or(1.0, |e| e.0);
                    (lo, hi)
                }
            };
            out.push(Equilibrium {
                p_star,
                stability,
                basin,
            });
        }
        Ok(out)
    }

    /// Fraction of the population that must switch to `p = 0` at once to
    /// leave the basin of the fully polarized state.
    pub fn escape_frequency(&self, chi: f64) -> Result<f64> {
        self.escape_frequency_with_grid(chi, ESCAPE_GRID)
    }

    pub fn escape_frequency_with_grid(&self, chi: f64, grid_n: usize) -> Result<f64> {
        let eqs = self.find_equilibria(chi, grid_n)?;
        Ok(match eqs.last() {
            Some(top) if top.p_star == 1.0 && top.stability == Stability::Stable => 1.0 - top.basin.0,
            _ => 0.0,
        })
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_positive = f_lo > 0.0;
    while hi - lo >= ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn group_average(
    econ: &EconomicParams,
    shape: &UtilityShape,
    theta: f64,
    chooser: &Stance,
    resident: &Stance,
    x: f64,
) -> f64 {
    let mut total = 0.0;
    for group in [Group::One, Group::Two] {
        let out = Outcomes::new(econ, shape, group, theta);
        total += x * utility_against(chooser, resident, x, &out)
            + (1.0 - x) * utility_against(chooser, resident, 1.0 - x, &out);
    }
    total / 2.0
}

/// Utility advantage of a two-dimensional OR mutant `(p_g, 0.5)` over a
/// monomorphic group-only resident at `p_g`, at the fixed environment
/// `econ.theta`. Positive values mean the OR logic can invade.
pub fn logic_switch_advantage(econ: &EconomicParams, shape: &UtilityShape, chi: f64, p_g: f64) -> Result<f64> {
    econ.validate()?;
    shape.validate()?;
    check_range("p_g", p_g, 0.0, 1.0, "0 <= p_g <= 1")?;
    let x = x_from_chi(chi)?;
    let resident = Stance::scalar(DecisionLogic::GroupOnly, p_g);
    let mutant = Stance {
        logic: DecisionLogic::TwoDimOr,
        group: p_g,
        party: 0.5,
    };
    Ok(group_average(econ, shape, econ.theta, &mutant, &resident, x)
        - group_average(econ, shape, econ.theta, &resident, &resident, x))
}
