use thiserror::Error;

/// Errors raised by the sampling/interpolation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point set: {0}")]
    InvalidSet(String),

    #[error("separation undefined: the set has fewer than two points")]
    SeparationUndefined,

    #[error("window length must be positive and finite, got {0}")]
    InvalidWindowLength(f64),

    #[error("window length {requested} exceeds the available window {available}")]
    WindowTooLong { requested: f64, available: f64 },

    #[error("point {point} is not on the lattice {delta}Z")]
    NotOnLattice { point: f64, delta: f64 },

    #[error("period {period} is not an integer multiple of the lattice step {delta}")]
    PeriodNotLatticeMultiple { period: f64, delta: f64 },

    #[error("perturbation too large: delta {delta} must be below d/4 = {limit}")]
    PerturbationTooLarge { delta: f64, limit: f64 },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("lattice step {delta} too coarse: must be below d/2 = {limit}")]
    LatticeTooCoarse { delta: f64, limit: f64 },

    #[error("rounding to the lattice produced a collision at {0}")]
    RoundingCollision(f64),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("spectrum is not contained in the ambient interval [{start}, {end}]")]
    NotContained { start: f64, end: f64 },

    #[error("duplicate point {0} in exponential system")]
    DuplicatePoint(f64),

    #[error("grid too coarse: {given} nodes per unit measure, at least {required} required")]
    GridTooCoarse { given: f64, required: f64 },

    #[error(
        "eigen-solver failed on a {dim}x{dim} matrix (frobenius norm {frobenius:.3e}, \
         diagonal range [{diag_min:.3e}, {diag_max:.3e}])"
    )]
    EigenFailure {
        dim: usize,
        frobenius: f64,
        diag_min: f64,
        diag_max: f64,
    },

    #[error("singular value decomposition failed on a {rows}x{cols} matrix")]
    SvdFailure { rows: usize, cols: usize },

    #[error("test function has zero norm")]
    ZeroNormProbe,

    #[error("no probes supplied")]
    NoProbes,

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("empty vector family")]
    EmptyFamily,

    #[error("vector dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trivial subspace: the projector is numerically zero")]
    TrivialSubspace,

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid discrete model: {0}")]
    InvalidModel(String),

    #[error("duality violation: {0}")]
    DualityViolation(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
