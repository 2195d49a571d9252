use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("{what} index {index} out of range 0..{bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("vector is not normalized: |v| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("vectors {i} and {j} are not orthonormal: <v_i|v_j> deviates by {deviation:e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },

    #[error("operator is not Hermitian: max |A - A^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("eigensolver did not converge after {iterations} rotations (off-diagonal norm {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("decision table entry s(k={k}, mu={mu}) = {value} not in 1..={d}")]
    InvalidDecision {
        k: usize,
        mu: usize,
        value: usize,
        d: usize,
    },

    #[error("assignment map f_mu is not bijective for mu in {failing:?}")]
    NotBijective { failing: Vec<usize> },

    #[error("exhaustive enumeration over {d}^{exponent} decision tables is too large")]
    EnumerationTooLarge { d: usize, exponent: usize },

    #[error("Gelfand witness interval [{lower}, {upper}] does not contain the Perron root {root} (residual {residual:e})")]
    GelfandMismatch {
        root: f64,
        lower: f64,
        upper: f64,
        residual: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Malformed(err.to_string())
    }
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
