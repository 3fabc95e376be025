use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A logistic iterate left [0, 1].
    #[error("logistic iterate {value} at step {step} left [0, 1]")]
    Overflow { step: usize, value: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    /// A flow coordinate became non-finite or exceeded the blowup bound.
    #[error("numerical blowup at integration step {step}: |x| = {magnitude} exceeds {bound}")]
    NumericalBlowup {
        step: u64,
        magnitude: f64,
        bound: f64,
    },

    #[error("size error: {0}")]
    Size(String),

    /// Too few positive points for a log-log regression.
    #[error("degenerate data: only {positive} positive entries, need at least 3")]
    DegenerateData { positive: usize },

    #[error("inconsistent class counts: {0}")]
    InconsistentCounts(String),

    #[error("invalid configuration: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    /// A numerical error raised while processing one parameter, or one
    /// (a, omega) work unit.
    #[error("at a = {a}{}: {source}", .omega.map(|w| format!(", omega = {w}")).unwrap_or_default())]
    AtPoint {
        a: f64,
        omega: Option<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors produced by the numerics rather than by configuration
    /// or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::AtPoint { source, .. } => source.is_numerical(),
            Error::Domain(_)
            | Error::Overflow { .. }
            | Error::Dimension(_)
            | Error::NumericalBlowup { .. }
            | Error::Size(_)
            | Error::DegenerateData { .. }
            | Error::InconsistentCounts(_) => true,
            Error::InvalidConfig { .. } | Error::Checkpoint { .. } | Error::Io(_) => false,
        }
    }
}
