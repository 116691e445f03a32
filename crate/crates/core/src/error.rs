use thiserror::Error;

/// Errors raised by the numerical engines and the model layers above them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("{func}: series not converged after {terms} terms (last order contributed {last:e}){}", hint_suffix(.hint))]
    NonConvergence { func: &'static str, terms: usize, last: f64, hint: Option<&'static str> },

    #[error("{func}: cancellation ratio {ratio:e} exceeds {limit:e}, result would be inaccurate{}", hint_suffix(.hint))]
    PrecisionLoss { func: &'static str, ratio: f64, limit: f64, hint: Option<&'static str> },

    #[error(
        "quadrature exhausted after {subdivisions} subdivisions: best estimate {value:e}, achieved error {error:e}"
    )]
    QuadratureExhausted { value: f64, error: f64, subdivisions: usize },

    #[error("{func}: intermediate or final value overflows f64{}", hint_suffix(.hint))]
    Overflow { func: &'static str, hint: Option<&'static str> },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },
}

fn hint_suffix(hint: &Option<&'static str>) -> String {
    match hint {
        Some(h) => format!("; fallback: {h}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { func, msg: msg.into() }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { path: path.into(), msg: msg.into() }
    }

    /// True for failures of a numerical method (as opposed to bad input),
    /// i.e. the cases where another evaluation route may still succeed.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::PrecisionLoss { .. }
                | Error::QuadratureExhausted { .. }
                | Error::Overflow { .. }
        )
    }

    /// Attach a fallback suggestion to a series failure.
    pub fn with_hint(self, fallback: &'static str) -> Self {
        match self {
            Error::NonConvergence { func, terms, last, .. } => {
                Error::NonConvergence { func, terms, last, hint: Some(fallback) }
            }
            Error::PrecisionLoss { func, ratio, limit, .. } => {
                Error::PrecisionLoss { func, ratio, limit, hint: Some(fallback) }
            }
            Error::Overflow { func, .. } => Error::Overflow { func, hint: Some(fallback) },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
