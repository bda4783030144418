use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("`{name}` at byte {offset} expects {expected} argument(s)")]
    ArityMismatch {
        name: String,
        offset: usize,
        expected: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite intermediate value")]
    NonFinite,

    #[error("jet order {requested} out of range (max {max})")]
    JetOrder { requested: usize, max: usize },

    #[error("insufficient jet order: need {needed}, have {have}")]
    InsufficientJetOrder { needed: usize, have: usize },

    #[error("point outside chart domain box: {0}")]
    OutsideDomain(String),

    #[error("metric not positive definite at sampled point")]
    SingularMetric,

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("geodesic shooting failed: {0}")]
    ShootingFailed(String),

    #[error("geodesic path left the chart domain box")]
    PathLeftDomain,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("unknown identity id `{0}`")]
    UnknownIdentity(String),

    #[error("manifest parse error at line {line}: {message}")]
    Manifest { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("potential is not basic: max |xi(psi)| = {residual:.3e} exceeds tolerance {tol:.3e}")]
    NonBasicPotential { residual: f64, tol: f64 },

    #[error("empty point sample")]
    EmptySample,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("eigen decomposition failed")]
    EigenFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
