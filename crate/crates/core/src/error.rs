use thiserror::Error;

/// Errors raised by the analytics.
///
/// Everything except [`Error::NoConvergence`] is a validation failure on the
/// caller's inputs; `NoConvergence` indicates a solver defect.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} = {value} is outside its domain ({requirement})")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("series order {order} is outside 1..={max}")]
    SeriesOrder { order: usize, max: usize },

    #[error("strike equals spot: the quantity is undefined at the money, use the at-the-money branch")]
    AtTheMoney,

    #[error("at-the-money formula requires strike == spot (spot {spot}, strike {strike})")]
    NotAtTheMoney { spot: f64, strike: f64 },

    #[error("premium {value} violates the no-arbitrage band ({lower}, {upper})")]
    Arbitrage { value: f64, lower: f64, upper: f64 },

    #[error("lambda = {lambda} is outside the asymptotic regime (0, {max})")]
    AsymptoticDomain { lambda: f64, max: f64 },

    #[error("first-order correction factor {factor} is not positive, use the exact conversion")]
    CorrectionBreakdown { factor: f64 },

    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
}

impl Error {
    /// `true` for failures caused by the inputs rather than the numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            requirement: "must be > 0",
        })
    }
}
