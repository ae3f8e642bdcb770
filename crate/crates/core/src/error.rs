use thiserror::Error;

#[derive(Debug, Error)]
pub enum FragmentError {
    #[error("fragment has no states")]
    NoStates,
    #[error("fragment has no effects")]
    NoEffects,
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("vector '{label}' has dimension {found}, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("vector '{label}' has a non-finite entry")]
    NonFinite { label: String },
    #[error("duplicate {kind} label '{label}'")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("unknown {kind} label '{label}'")]
    UnknownLabel { kind: &'static str, label: String },
    #[error("noise matrix is {rows}x{cols} but the fragment lives in dimension {dim}")]
    NoiseDimension { rows: usize, cols: usize, dim: usize },
    #[error("noise map does not fix the unit effect (deviation {deviation:.3e})")]
    NoiseDoesNotFixUnit { deviation: f64 },
    #[error("mixing weight {0} is outside [0, 1]")]
    MixingWeight(f64),
    #[error("maximally mixed state has <u, s_D> = {0}, expected 1")]
    InvalidMaxmix(f64),
    #[error("malformed fragment JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("no nonzero generators")]
    Degenerate,
    #[error("generators have inconsistent dimensions ({expected} vs {found})")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator span has dimension {found}, expected {expected}")]
    SpanDimension { expected: usize, found: usize },
    #[error("generators are numerically dependent at tolerance {tol:e}")]
    IllConditioned { tol: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("constraint matrix is {rows}x{cols}, objective has {n_obj} entries and rhs {n_rhs}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        n_obj: usize,
        n_rhs: usize,
    },
    #[error("upper bound vector has {found} entries, expected {expected}")]
    BoundsMismatch { expected: usize, found: usize },
    #[error("non-finite coefficient in linear program")]
    NonFinite,
    #[error("simplex stalled after {0} iterations")]
    IterationLimit(usize),
    #[error("basis matrix became numerically singular")]
    SingularBasis,
}

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
    #[error("corrupted certificate: {0}")]
    CertificateCorruption(String),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario parameter: {0}")]
    InvalidParams(String),
    #[error("data table is not in the symmetric family (residual {residual:.3e})")]
    NotParameterizable { residual: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}
