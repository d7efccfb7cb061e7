use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision exhausted: {needed} bits needed, ceiling is {ceiling}")]
    PrecisionExhausted { needed: u32, ceiling: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("linearly degenerate: {0}")]
    Degenerate(String),

    #[error("no flats of codimension {0} in the lattice")]
    MissingCodimension(usize),

    #[error("hyperplane system has {len} members, enumeration cap is {cap}")]
    TooManyHyperplanes { len: usize, cap: usize },

    #[error("point lies on hyperplane {0}")]
    OnHyperplane(usize),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("could not certify: {0}")]
    Uncertified(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
