use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// configuration/domain problems exit with 2, numerical failures with 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coefficient symmetry violated: {0}")]
    Symmetry(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),

    #[error("spectral gap violated: {0}")]
    GapViolation(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI contract: 2 = configuration error,
    /// 3 = internal numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Symmetry(_) | Error::Parse(_) => 2,
            Error::Io { .. } => 2,
            Error::Numerical(_) | Error::Quadrature(_) | Error::GapViolation(_) => 3,
        }
    }
}
