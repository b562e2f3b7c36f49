use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which ratio of [`crate::evalkit::precision_recall_f`] had a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Precision,
    Recall,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Precision => f.write_str("precision"),
            Metric::Recall => f.write_str("recall"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The response is constant, so no dependence measure is defined.
    #[error("degenerate response: y is constant")]
    DegenerateResponse,

    /// A predictor (or the response, for symmetric measures) has zero spread.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("undefined metric: {0} has a zero denominator")]
    UndefinedMetric(Metric),

    #[error("replication {index}: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
