//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Atomic series or state not covered by the shipped data.
    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    /// Dipole selection rules violated.
    #[error("selection rule violation: {0}")]
    SelectionRule(String),

    /// Model configuration outside the supported parameter space.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Invalid configuration (empty tables, bad tolerances, bad ranges).
    #[error("configuration error: {0}")]
    Config(String),

    /// Numerical failure with diagnostics.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Quadrature or series summation did not converge.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Malformed data file.
    #[error("data file error ({file}, line {line}): {message}")]
    DataFile {
        file: String,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
