use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular (determinant 0)")]
    SingularMatrix,
    #[error("matrix must be square and non-empty")]
    MalformedMatrix,
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("token `{token}` is outside the alphabet of a rank-{dim} group")]
    TokenOutOfAlphabet { token: String, dim: usize },
    #[error("element is not Britton-reduced")]
    NotReduced,
    #[error("invalid integer literal `{0}`")]
    InvalidInteger(String),
    #[error("word expansion would need {needed} tokens (cap {cap})")]
    ExpansionCap { needed: usize, cap: usize },
    #[error("grammar error: {0}")]
    Grammar(String),
    #[error("grammar generates the empty language")]
    EmptyLanguage,
    #[error("sampling budget exhausted after {attempts} attempts (max_length {max_length})")]
    SampleBudgetExhausted { attempts: usize, max_length: usize },
    #[error("invalid sample policy: {0}")]
    InvalidPolicy(String),
    #[error("degenerate orbit: generator vector is zero")]
    DegenerateOrbit,
    #[error("exponent {exponent} exceeds bound {bound}")]
    ExponentBound { exponent: u64, bound: u64 },
    #[error("commutation check failed: {0}")]
    CommutationFailure(String),
    #[error("key mismatch between parties")]
    KeyMismatch,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that signal a broken internal invariant rather than bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, Error::CommutationFailure(_) | Error::KeyMismatch)
    }
}
