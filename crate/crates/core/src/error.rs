use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero state: amplitude norm {norm:e} is below 1e-14")]
    ZeroState { norm: f64 },

    #[error("normalization violated: norm {norm} deviates from 1 by more than {tol:e}")]
    NormViolation { norm: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian: max |rho_mn - conj(rho_nm)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace violated: Tr rho = {trace}")]
    TraceViolation { trace: f64 },

    #[error("not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid isometry: max |V^dag V - I| = {deviation:e}")]
    InvalidIsometry { deviation: f64 },

    #[error("state has numerical rank 0")]
    RankDeficient,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("zero operator: Hilbert-Schmidt norm below 1e-14")]
    ZeroOperator,

    #[error("parameter error: {0}")]
    Param(String),

    #[error("null outcome: output trace {trace:e} is below 1e-14")]
    NullOutcome { trace: f64 },

    #[error("incomplete instrument: branch probabilities sum to {total}")]
    IncompleteInstrument { total: f64 },

    #[error("mode unsupported: {0}")]
    ModeUnsupported(String),

    #[error("input too large: joint dimension {dim} exceeds limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("wrong state kind: {0}")]
    Kind(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant breached [{invariant}]: {detail}")]
    InvariantBreach { invariant: String, detail: String },
}

impl Error {
    pub(crate) fn breach(invariant: &str, detail: impl Into<String>) -> Self {
        Error::InvariantBreach {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }

    /// True for errors caused by malformed numeric input (as opposed to
    /// unreadable input or internal invariant failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Parse(_) | Error::InvariantBreach { .. })
    }
}
