use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument or parameter lies outside the set where the operation is defined.
    #[error("domain error in `{what}`: {reason}")]
    Domain { what: &'static str, reason: String },

    /// The step policy exhausted its halvings without producing a positive state.
    #[error("simulation failed at t = {time}: step still non-positive after {halvings} halvings")]
    SimulationFailure { time: f64, halvings: u32 },

    #[error("non-finite estimate for {what}")]
    Overflow { what: String },

    #[error("insufficient sample: need at least {needed} values, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("stationary law unavailable: {0}")]
    LawUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            what,
            reason: reason.into(),
        }
    }
}
