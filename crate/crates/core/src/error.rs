use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),

    #[error("item mismatch at position {index}: `{left}` vs `{right}`")]
    ItemMismatch {
        index: usize,
        left: String,
        right: String,
    },

    #[error("item `{0}` has no responses")]
    EmptyItem(String),

    #[error("response {value} of item `{item_id}` is outside [0, 1]")]
    ValueOutOfRange { item_id: String, value: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("both samples have zero variance")]
    DegenerateVariance,

    #[error("all differences are zero")]
    AllZeroDifferences,

    #[error("no grid point yields a valid distribution")]
    NoValidGridPoint,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(reason: impl Into<String>) -> Self {
        Error::InvalidConfig(reason.into())
    }
}
