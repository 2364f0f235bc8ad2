use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: unknown labels, parse failures, out-of-range values.
    #[error("input error: {0}")]
    Input(String),

    /// A separation query whose sets are empty, overlapping or unknown.
    #[error("invalid query: {0}")]
    Query(String),

    /// Sample size too small or mismatched dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An operation was called outside its documented domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} is not positive definite (factorization failed at pivot {pivot})")]
    NotPositiveDefinite { what: String, pivot: usize },

    /// The assembled covariance is not positive definite; carries the smallest eigenvalue.
    #[error("{what} is not positive definite (smallest eigenvalue {min_eigenvalue:.6e})")]
    ModelData { what: String, min_eigenvalue: f64 },

    /// A matrix that should lie in the model has non-zero entries at non-edges.
    #[error("matrix violates the zero pattern of the graph at {}", format_offending(.offending))]
    ModelMembership { offending: Vec<(String, String, f64)> },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn format_offending(entries: &[(String, String, f64)]) -> String {
    entries
        .iter()
        .map(|(a, b, v)| format!("({a},{b})={v:e}"))
        .collect::<Vec<_>>()
        .join(", ")
}
