use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Tensor, bond or input dimensions do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("invalid feature map: {0}")]
    InvalidFeatureMap(String),

    /// Syntax error in a boolean expression; `offset` is a byte offset into the source.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// An exponentially sized object would exceed its guard.
    #[error("{what} of size {size} exceeds the limit {limit}")]
    Size {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("incompatible activations: {0}")]
    IncompatibleActivation(String),

    #[error("C-reparameterization needs k > 0, got {0}")]
    UnsupportedReparameterization(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("kernel naming unsupported: {0}")]
    UnsupportedNaming(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("batch item {index}: {source}")]
    BatchItem {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
