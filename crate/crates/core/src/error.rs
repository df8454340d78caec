use thiserror::Error;

/// Errors produced by fan construction, surgery and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input does not describe a fan at all (bad index, zero ray, ...).
    #[error("structural error at {location}: {message}")]
    Structural { location: String, message: String },

    #[error("non-primitive ray {index}: {coords}")]
    NonPrimitiveRay { index: usize, coords: String },

    #[error("fan is not complete")]
    NotComplete,

    #[error("fan is not smooth")]
    NotSmooth,

    #[error("fan is not projective")]
    NotProjective,

    #[error("cone {0:?} is not a cone of the fan")]
    NotACone(Vec<usize>),

    #[error("not blow-downable at ray {0}")]
    NotBlowDownable(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A mathematical statement that must hold on valid input failed.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn structural(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Structural {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by malformed input rather than a failed
    /// mathematical check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Structural { .. }
                | Error::NonPrimitiveRay { .. }
                | Error::Parse(_)
                | Error::Io(_)
                | Error::UnknownCatalog(_)
                | Error::NotACone(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
