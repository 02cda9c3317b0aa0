use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested quantity is not defined for these parameters (for
    /// example a phase-matching equation with a continuum of roots).
    #[error("degenerate parameter point: {0}")]
    Degenerate(String),

    /// A configuration file failed validation; one message per offending key.
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    /// A numerical procedure failed to converge or produced a non-finite
    /// value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for command-line front ends: `2` for numerical
    /// failures, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
