use std::path::PathBuf;

/// Errors produced anywhere in the receiver-design pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("search direction has no coordinate above the degeneracy threshold")]
    DegenerateDirection,

    #[error("matrix is not invertible modulo {p}")]
    NotInvertibleModP { p: u64 },

    #[error("instance too large: {size} points exceed the enumeration guard of {limit}")]
    InstanceTooLarge { size: u128, limit: u128 },

    #[error("integer overflow during exact arithmetic")]
    Overflow,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
