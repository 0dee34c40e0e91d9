use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("out of bounds: {0}")]
    Bounds(&'static str),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("invalid value for `{field}`: {reason}")]
    Config { field: String, reason: String },
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
