use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    #[error("system is singular (smallest eigenvalue {min_eigenvalue:.3e})")]
    SingularSystem { min_eigenvalue: f64 },
    #[error("penalty parameters must be positive (c1 = {c1}, c2 = {c2})")]
    InvalidPenalty { c1: f64, c2: f64 },
    #[error("hyperplane normal has (near) zero norm {norm:.3e}")]
    DegenerateHyperplane { norm: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryOperator { deviation: f64 },
    #[error("invalid projector set: {0}")]
    InvalidProjectorSet(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix has zero Frobenius norm")]
    EmptyMatrix,
    #[error("rows sum to the zero vector; postselection probability is zero")]
    ZeroColumnSum,
    #[error("phase wraparound: lambda_max * t0 = {product:.4} >= 2*pi")]
    PhaseWraparound { product: f64 },
    #[error("input state lies entirely in the eigenspace below the inversion cutoff")]
    SingularOnSupport,
    #[error("state has weight {weight:.3e} outside the first {support} basis states")]
    PaddingLeakage { weight: f64, support: usize },
    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("simulation needs {required} qubits but the cap is {cap}")]
    QubitCapExceeded { required: usize, cap: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported model file version `{found}` (expected `{expected}`)")]
    ModelVersion { found: String, expected: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Json(_) | Error::ModelVersion { .. } => 2,
            Error::QubitCapExceeded { .. } => 4,
            Error::DimensionMismatch { .. } => 5,
            Error::Io(_) | Error::InvalidConfig(_) | Error::InvalidSpec(_) => 1,
            _ => 3,
        }
    }
}
