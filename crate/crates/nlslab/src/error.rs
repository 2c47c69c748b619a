use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum NlsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite integrand")]
    NonFiniteIntegrand,

    #[error("non-finite field value at index {0}")]
    NonFiniteField(usize),

    #[error("derivative order {0} not supported (expected 1, 2 or 4)")]
    BadDerivativeOrder(u32),

    #[error("background mismatch: {0}")]
    BackgroundMismatch(String),

    #[error("near-singular evaluation at x = {x} (denominator {denom:.3e})")]
    NearSingular { x: f64, denom: f64 },

    #[error("virial weight unbounded: {0}")]
    WeightUnbounded(String),

    #[error("weight overwhelms decay: {0}")]
    WeightOverwhelmsDecay(String),

    #[error("orbit escaped at t = {0}")]
    OrbitEscaped(f64),

    #[error("time {0} outside integrated orbit span [0, {1}]")]
    OutsideOrbitSpan(f64, f64),

    #[error("ground-state iteration did not converge: residual {0:.3e} after {1} iterations")]
    NoConvergence(f64, usize),

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("inconsistent facts: {0}")]
    InconsistentFacts(String),

    #[error("unknown invariant key: {0}")]
    UnknownKey(String),

    #[error("scenario parse error at line {line}, column {col}: {msg}")]
    ScenarioParse { line: usize, col: usize, msg: String },

    #[error("unknown catalog id: {0}")]
    UnknownCatalogId(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NlsError>;
