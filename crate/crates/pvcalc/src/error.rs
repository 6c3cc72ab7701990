use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live over different signatures")]
    SignatureMismatch,
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("Laurent coefficients are not supported here")]
    LaurentUnsupported,
    #[error("no bracket for ({0}, {1}) in the table and none derivable by skew-symmetry")]
    MissingBracket(String, String),
    #[error("n-th product with n = {0} is unsupported")]
    UnsupportedProduct(i64),
    #[error("jet order {0} exceeds the configured cap {1}")]
    OrderCap(u32, u32),
    #[error("expected a weight-1 element: {0}")]
    NotWeightOne(String),
    #[error("Lagrangian has jet order above 1")]
    HigherOrderLagrangian,
    #[error("fiber metric is not invertible or not constant")]
    NonInvertibleFiberMetric,
    #[error("on-shell reduction left a residue: {0}")]
    Reduction(String),
    #[error("parity/weight mismatch: {0}")]
    ParityWeightMismatch(String),
    #[error("not a polyvector: {0}")]
    NotPolyvector(String),
    #[error("truncation is not stable under the differential at weight {weight}, fermion number {fermion}")]
    TruncationUnstable { weight: i64, fermion: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("serialization error: {0}")]
    Serialization(String),
}
