//! The S-shaped utility curve that maps material payoff to utility.
//!
//! `F(x) = σ(hx)·(1 + a·x)` where `σ` is the logistic function. Near the
//! concave shoulder of the sigmoid a failed interaction costs a lot of
//! utility (risk aversion); on the convex foot a success gains a lot (risk
//! tolerance); far above zero the curve is essentially linear.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, ModelError, Result};

/// Shape of the utility curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityShape {
    /// Steepness of the sigmoid component.
    pub h: f64,
    /// Slope of the linear component.
    pub a: f64,
}

impl Default for UtilityShape {
    fn default() -> Self {
        Self { h: 10.0, a: 0.02 }
    }
}

/// Payoffs at which the curve is maximally concave and maximally convex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskExtrema {
    pub concave: f64,
    pub convex: f64,
}

impl UtilityShape {
    pub fn new(h: f64, a: f64) -> Result<Self> {
        let shape = Self { h, a };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(ModelError::OutOfRange {
                field: "h",
                value: self.h,
                expected: "h > 0",
            });
        }
        check_range("a", self.a, 0.0, 1.0, "0 <= a < 1")?;
        if self.a >= 1.0 {
            return Err(ModelError::OutOfRange {
                field: "a",
                value: self.a,
                expected: "0 <= a < 1",
            });
        }
        Ok(())
    }

    /// Utility of payoff `x`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        logistic(self.h * x) * (1.0 + self.a * x)
    }

    /// Closed-form location of the concave and convex extremes of the
    /// sigmoid component. Only exact for `a = 0`; the linear term shifts the
    /// true extremes by O(a/h).
    pub fn risk_extrema(&self) -> RiskExtrema {
        if self.a > 0.1 {
            log::warn!(
                "risk extrema assume a << 1, got a = {}; the estimate may be poor",
                self.a
            );
        }
        let s3 = 3f64.sqrt();
        let concave = ((s3 + 1.0) / (s3 - 1.0)).ln() / self.h;
        RiskExtrema {
            concave,
            convex: -concave,
        }
    }
}

/// Free-function form of [`UtilityShape::eval`].
#[inline]
pub fn utility(x: f64, shape: &UtilityShape) -> f64 {
    shape.eval(x)
}

/// Logistic function that neither overflows nor cancels for large `|z|`.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
