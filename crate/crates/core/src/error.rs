use thiserror::Error;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model response could not be read. The raw text is kept so callers
    /// can show it to the user.
    #[error("could not parse model response: {message}")]
    Parse { message: String, raw: String },

    #[error("no arrangement could be built from the segmentation output")]
    NoArrangement,

    #[error("template error: {0}")]
    Template(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }

    pub fn parse(message: impl Into<String>, raw: &str) -> Self {
        CoreError::Parse {
            message: message.into(),
            raw: raw.to_string(),
        }
    }
}
