use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate frame (Gram determinant {0:e})")]
    DegenerateFrame(f64),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not in SL(n,R): |det - 1| = {0:e}")]
    NotSpecialLinear(f64),
    #[error("matrix is not symplectic: |tg J g - J| = {0:e}")]
    NotSymplectic(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration cap of {cap} matrices exceeded after {emitted} outputs")]
    CapExceeded { cap: u64, emitted: u64 },
    #[error("integer overflow during exact arithmetic")]
    Overflow,
    #[error("region is not integrable: {0}")]
    NonIntegrable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
