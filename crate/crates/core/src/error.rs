use thiserror::Error;

/// Errors raised by the estimator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry buffer has length {len}, expected {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("negative eigenvalue {value}")]
    NegativeEigenvalue { value: f64 },

    #[error("vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("operator is not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("sampled mode requires at least one shot")]
    NoShots,

    #[error("invalid probe {kind:?}({n}, {k}) for dimension {dim}")]
    InvalidProbe {
        kind: crate::tomography::ProbeKind,
        n: usize,
        k: usize,
        dim: usize,
    },

    #[error("tomography requires dimension >= 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("expected {expected} visibilities, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("no positive eigenvalue survives clipping")]
    ZeroAfterClipping,

    #[error("observable is the zero operator")]
    ZeroObservable,

    #[error("visibility {0} is inconsistent with a qubit purity")]
    InconsistentVisibility(f64),

    #[error("Kraus operators are incomplete: max |sum K^dagger K - I| = {deviation:e}")]
    IncompleteKraus { deviation: f64 },

    #[error("Choi state reference marginal deviates from I/d by {deviation:e}")]
    ChoiMarginal { deviation: f64 },

    #[error("neither qubit is maximally mixed (marginal deviations {dev_a:e}, {dev_b:e})")]
    NoMaximallyMixedSubsystem { dev_a: f64, dev_b: f64 },

    #[error("expected a two-qubit operator, got dimension {0}")]
    NotTwoQubit(usize),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
