use crate::pipeline::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("configuration rejected:\n{0}")]
    Validation(ValidationReport),

    #[error("gaze sample out of sequence: t={got} arrived after t={last}")]
    OutOfSequence { last: f64, got: f64 },

    #[error("profile (format_version {version}): {message}")]
    Profile { version: u32, message: String },

    #[error("assessment: {0}")]
    Assessment(String),

    #[error("image decode: {0}")]
    Decode(String),

    #[error("gaze record: {0}")]
    GazeRecord(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
