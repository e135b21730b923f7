use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input validation failure, naming the offending entry.
    #[error("negative citation count {value} at index {index}")]
    NegativeCount { index: usize, value: i64 },
    /// The data is structurally valid but too degenerate to analyze
    /// (empty list, all zeros, too few usable regression points, ...).
    #[error("degenerate data: {0}")]
    Degenerate(String),
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A simulation configuration violates its documented bounds.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
