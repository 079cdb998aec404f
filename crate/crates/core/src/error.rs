use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A structural hypothesis the sampler relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Regular,
    Connected,
    ComplementConnected,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Regular => "graph is not regular",
            Hypothesis::Connected => "graph disconnected",
            Hypothesis::ComplementConnected => "complement disconnected",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Hypothesis(Hypothesis),

    #[error("{what} has {size} elements, above the cap of {cap}; {hint}")]
    SizeCap {
        what: &'static str,
        size: String,
        cap: u128,
        hint: &'static str,
    },

    #[error("relative error undefined: reference distribution vanishes at state {0}")]
    ZeroReference(usize),

    #[error("burn-in cannot be derived: {0}; pass it explicitly")]
    BurnInUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Hypothesis(_) => "hypothesis",
            Error::SizeCap { .. } => "size_cap",
            Error::ZeroReference(_) => "zero_reference",
            Error::BurnInUnavailable(_) => "burn_in_unavailable",
            Error::Io(_) => "io",
        }
    }
}
