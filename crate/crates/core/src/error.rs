use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The coupling is at or beyond the stability boundary, where ω₂ becomes imaginary.
    #[error("coupling lambda = {lambda} violates the stability bound lambda < 0.5")]
    Unstable { lambda: f64 },

    #[error("{name} = {value} is out of range: expected {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error(
        "attractive coupling lambda = {lambda} rejected by an energy evaluation \
         (enable the attractive branch explicitly)"
    )]
    AttractiveRejected { lambda: f64 },

    #[error("no sign change brackets the stationarity root (lambda = {lambda}, q = {q})")]
    BracketFailure { lambda: f64, q: f64 },

    #[error(
        "stationarity residual changes sign {count} times (lambda = {lambda}, q = {q}); \
         expected exactly one root"
    )]
    MultipleRoots { lambda: f64, q: f64, count: usize },

    #[error("R(lambda) - 1 has no sign change on [{lo}, {hi}] for q = {q}")]
    NoCrossing { q: f64, lo: f64, hi: f64 },

    #[error("series needs {needed} terms but the limit is {limit}")]
    Truncation { needed: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by inputs outside the model's validity window.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Unstable { .. }
                | Error::Domain { .. }
                | Error::AttractiveRejected { .. }
                | Error::Truncation { .. }
                | Error::Config(_)
        )
    }

    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}
