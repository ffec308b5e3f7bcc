//! Crate-wide error type.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A table or buffer allocation would exceed the configured capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An argument lies outside the range covered by a precomputed table.
    #[error("out of table range: {0}")]
    OutOfRange(String),

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The running tracker V*Q - U*x left the 64-bit design envelope,
    /// i.e. |R_k(x)| / x^(1/2k) reached 4 or the range exceeded 10^18.
    #[error("tracker overflow near x = {x}: scaled error left the design envelope")]
    TrackerOverflow { x: u64 },

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("checkpoint version {found} not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("checkpoint does not match requested scan: {0}")]
    CheckpointMismatch(String),

    #[error("zeros file: {0}")]
    ZerosFormat(String),

    /// A requested precision target cannot be met within the configured
    /// term budget, or an Euler-product expansion does not converge.
    #[error("precision: {0}")]
    Precision(String),

    #[error("lattice basis is rank deficient")]
    RankDeficient,

    /// Weight function not admissible for bound computations.
    #[error("kernel {0} is not admissible for bound computations")]
    InadmissibleKernel(String),

    #[error("partition ranges are not contiguous: {0}")]
    NonContiguous(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
