use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the allowed range [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{source_name}:{line}: {message}")]
    Data {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("series balance did not converge after {iterations} bisection steps, bracket [{lo}, {hi}] N")]
    NonConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("simulation diverged at t = {time} s; offending state: {state:?}")]
    Diverged {
        time: f64,
        state: Box<crate::joint::JointState>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input rather than a failure while
    /// running an otherwise valid request.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. }
                | Error::InvalidParameter(_)
                | Error::Fit(_)
                | Error::Data { .. }
                | Error::Json(_)
        )
    }
}

/// Returns `Err(OutOfRange)` unless `min <= value <= max` and `value` is finite.
pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<f64> {
    if value.is_finite() && value >= min && value <= max {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        })
    }
}
