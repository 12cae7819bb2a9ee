use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..=3)")]
    UnsupportedDimension(usize),

    #[error("operation on an empty body")]
    EmptyBody,

    #[error("valuation of the zero section is undefined")]
    ZeroSection,

    #[error("({k}, {alpha:?}) is not in the semigroup")]
    NotInSemigroup { k: usize, alpha: Vec<u32> },

    #[error("degree {k} exceeds the computed range (k_max = {k_max})")]
    DegreeOutOfRange { k: usize, k_max: usize },

    #[error("product of basis elements of degrees {k} and {m} is not in V_{}", k + m)]
    ClosureViolation { k: usize, m: usize },

    #[error("section is not homogeneous of degree {0}")]
    NotHomogeneous(usize),

    #[error(
        "enumeration budget exceeded ({visited} points > cap {cap}); partial result: {partial}"
    )]
    Budget {
        visited: u64,
        cap: u64,
        partial: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("boundedness check failed: {0}")]
    Unbounded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("format {format} is not supported for {artifact}")]
    Format { artifact: String, format: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Budget-type errors map to the CLI's config/budget exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
