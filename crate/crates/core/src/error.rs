use thiserror::Error;

use crate::strategy::DecisionLogic;

/// Errors raised while validating model inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field} = {value} is out of range ({expected})")]
    OutOfRange {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("{logic} logic needs a {expected} strategy")]
    StrategyDimension {
        logic: DecisionLogic,
        expected: &'static str,
    },
    #[error("inconsistent economic parameters: {0}")]
    Economy(&'static str),
    #[error("grid resolution {value} for {field} is too small (minimum {min})")]
    Resolution {
        field: &'static str,
        value: usize,
        min: usize,
    },
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn check_range(
    field: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(ModelError::OutOfRange {
            field,
            value,
            expected,
        })
    }
}
