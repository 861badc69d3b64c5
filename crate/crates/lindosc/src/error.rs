use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("Fock dimension must be at least 2, got {dim}")]
    DimensionTooSmall { dim: usize },

    #[error("dimension {dim} exceeds the supported dense envelope of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("mode (j={j}, k={k}) invalid: need |k| <= j and j - |k| even")]
    InvalidMode { j: usize, k: isize },

    #[error(
        "dimension {dim} too small for mode j={j}: need at least {required} \
         so the thermal tail xi^(D-j) stays below 1e-12"
    )]
    InsufficientDim { dim: usize, j: usize, required: usize },

    #[error("index ordering violated: need {requirement}, got ({p}, {q}, {r})")]
    InvalidOrdering {
        requirement: &'static str,
        p: usize,
        q: usize,
        r: usize,
    },

    #[error("xi must lie strictly between 0 and 1, got {xi}")]
    XiOutOfRange { xi: String },

    #[error(
        "evolution pushed population {population:.3e} into the top truncation \
         level (limit {limit:.1e}); increase the dimension"
    )]
    TruncationSpill { population: f64, limit: f64 },

    #[error("ladder order m+n = {order} exceeds the spread guard {guard} at dimension {dim}")]
    LadderGuard { order: usize, guard: usize, dim: usize },

    #[error(
        "not a density matrix: hermiticity defect {hermiticity:.3e}, \
         trace defect {trace_defect:.3e}, min eigenvalue {min_eigenvalue:.3e}"
    )]
    InvalidDensity {
        hermiticity: f64,
        trace_defect: f64,
        min_eigenvalue: f64,
    },

    #[error("observable expected to be real has imaginary residue {0:.3e}")]
    ResidualImaginary(f64),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("matrix file parse error at line {line}: {message}")]
    MatrixParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("linear algebra backend failure: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
