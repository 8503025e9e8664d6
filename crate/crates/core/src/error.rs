use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FgnError {
    #[error("Hurst index {0} is outside the admissible range")]
    InvalidHurst(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("denominator {value:e} fell below {threshold:e} in {context}")]
    DegenerateDenominator {
        context: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(u32),

    #[error("unsupported window {0}")]
    UnsupportedWindow(usize),

    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("unknown table id `{0}`")]
    UnknownTable(String),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cross-check failed in {context}: {lhs} vs {rhs}")]
    CrossCheck {
        context: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl FgnError {
    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            FgnError::NotPositiveDefinite { .. }
                | FgnError::Singular { .. }
                | FgnError::DegenerateDenominator { .. }
                | FgnError::NoSignChange { .. }
                | FgnError::CrossCheck { .. }
        )
    }
}

pub type Result<T, E = FgnError> = std::result::Result<T, E>;
