use thiserror::Error;

/// Errors raised across the library. The CLI maps the variants onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed element encodings, unknown vertices, bad orbit labels.
    #[error("data error: {0}")]
    Data(String),

    /// A finite window does not see enough of the infinite graph.
    #[error("incomplete window: {0}")]
    IncompleteWindow(String),

    #[error("resource limit: {what} exceeds the cap of {cap} vertices")]
    ResourceLimit { what: String, cap: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    /// Weight scheme and oracle disagree (e.g. transition probabilities not summing to one).
    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
