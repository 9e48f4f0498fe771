use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("pair indices must differ (got {0} twice)")]
    SameIndex(usize),
    #[error("variable count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("degree must exceed 1 (got {0})")]
    DegreeTooLow(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid domain: {0}")]
    Domain(String),
    #[error("matrix is singular")]
    Singular,
    #[error("radius underflow while certifying: {0}")]
    RadiusUnderflow(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("newton iteration failed: {0}")]
    Newton(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("no sign change of F along the transversal axis")]
    NoSignChange,
    #[error("root at {point:?} is singular (|grad F| = {grad_norm:e})")]
    SingularRoot { point: Vec<f64>, grad_norm: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
