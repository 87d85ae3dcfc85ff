use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (singular value ratio {ratio:.3e})")]
    Singular { ratio: f64 },
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("point is not in the chart (lies at infinity)")]
    NotInChart,
    #[error("points `{first}` and `{second}` are not transversal")]
    NotTransversal { first: String, second: String },
    #[error("1 is an eigenvalue; the Cayley preimage is at infinity")]
    CayleyPole,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn not_transversal(first: &str, second: &str) -> Self {
        Error::NotTransversal {
            first: first.to_string(),
            second: second.to_string(),
        }
    }
}
