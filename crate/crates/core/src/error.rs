use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
///
/// The CLI maps [`Error::Domain`], [`Error::Range`], [`Error::Parameter`] and
/// [`Error::Model`] to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A request exceeds an exactness window (degree caps, Stirling table size).
    #[error("range error: {0}")]
    Range(String),
    /// A parameter combination that the formula does not cover.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The velocity model does not offer the requested quantity.
    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be strictly positive and finite, got {value}"
        )))
    }
}
