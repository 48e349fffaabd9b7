use thiserror::Error;

/// Errors produced by the models, simulators and scenario front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An operation was evaluated outside the region where its model holds.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// Requested calibration targets cannot be met by the model.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// A target that no parameter value can achieve.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative solve or an unloaded fixed point did not settle.
    #[error("divergence: {0}")]
    Divergence(String),

    /// The rectifier state machine reached a state with no reachable event.
    #[error("state machine deadlock in {state} at t={t:.9e} s: {detail}")]
    Deadlock {
        state: String,
        t: f64,
        detail: String,
    },

    /// A simulated trace broke a physical invariant.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Scenario file could not be read, parsed or validated.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input files or parameters rather than by
    /// a failing simulation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidParameter { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with [`Error::InvalidParameter`] unless `cond` holds.
pub(crate) fn ensure(cond: bool, name: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(name, reason))
    }
}
