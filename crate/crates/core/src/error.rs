use thiserror::Error;

/// Errors produced by geometry, regret, reformulation and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported combination: {set} with {norm} dual norm ({reason})")]
    UnsupportedCombination {
        set: &'static str,
        norm: &'static str,
        reason: &'static str,
    },

    #[error("point is not in the feasible set (tolerance {tol:e})")]
    NotInFeasibleSet { tol: f64 },

    #[error("invalid risk level alpha = {0}; expected 0 <= alpha < 1")]
    InvalidAlpha(f64),

    #[error("invalid radius {0}; expected a finite value >= 0")]
    InvalidRadius(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension {0} too large for grid enumeration (max 3)")]
    DimensionTooLarge(usize),

    #[error("numerical breakdown: pivot magnitude {0:e} below 1e-12")]
    NumericalBreakdown(f64),

    #[error("candidate grid does not contain every nominal atom")]
    InfeasibleGrid,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
