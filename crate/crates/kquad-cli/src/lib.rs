//! Batch experiment harness for greedy kernel quadrature: candidate
//! generation, greedy-vs-uniform comparison runs, quadrature compression of
//! uncertainty-quantification datasets, and plot-ready data emission.

pub mod config;
pub mod experiment;
pub mod plotdata;
pub mod uq;

use std::fmt;

/// Process-level failure classes; each carries its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit code 2: configuration/input problems.
    Config(String),
    /// Exit code 3: numerical breakdown.
    Numerical(String),
    /// Exit code 4: I/O and file-format problems.
    Io(String),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Failure::Numerical(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure::Io(msg.into())
    }

    /// Classify a library error as a config-style failure source.
    pub fn from_config_err(err: kquad::Error) -> Self {
        Failure::from(err)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message())
    }
}

impl std::error::Error for Failure {}

impl From<kquad::Error> for Failure {
    fn from(err: kquad::Error) -> Self {
        use kquad::Error::*;
        match err {
            PowerBreakdown { .. } | SingularGram => Failure::Numerical(err.to_string()),
            Parse { .. } | Io(_) => Failure::Io(err.to_string()),
            InvalidInput(_) | DimensionMismatch { .. } | LengthMismatch { .. }
            | DuplicatePoints { .. } | AlreadySelected { .. } => {
                Failure::Config(err.to_string())
            }
        }
    }
}
