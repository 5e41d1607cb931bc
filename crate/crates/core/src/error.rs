use thiserror::Error;

/// Errors shared by every subsystem of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("weight matrix must have size at least {min}, got {got}")]
    MatrixTooSmall { min: usize, got: usize },

    #[error("matrix is not admissible: {0}")]
    NotAdmissible(String),

    #[error("{0} must be an odd prime, got {1}")]
    NotOddPrime(&'static str, String),

    #[error("primes must be distinct, got {0} twice")]
    PrimesEqual(String),

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("vector is not primitive (gcd {0})")]
    NotPrimitive(String),

    #[error("sphere dimension must be odd and at least 3, got {0}")]
    BadSphereDimension(u32),

    #[error("stable order must be at least 1, got {0}")]
    BadStableOrder(i64),

    #[error("bundle is real; Chern classes are only computed for complex bundles")]
    RealBundle,

    #[error("search budget fields must be positive")]
    BadBudget,

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("invalid ring definition: {0}")]
    BadRingDefinition(String),

    #[error("invalid torus action spec: {0}")]
    BadActionSpec(String),

    #[error("invalid Betti profile: {0}")]
    BadBettiProfile(String),

    #[error("unknown built-in ring `{0}`")]
    UnknownBuiltin(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
