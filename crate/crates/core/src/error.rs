use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter set or bound that fails validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    OutOfBounds(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("invalid statistical input: {0}")]
    Stats(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from user input rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::OutOfBounds(_)
                | Error::UnknownScenario(_)
                | Error::UnknownAlgorithm(_)
                | Error::Stats(_)
                | Error::Parse(_)
        )
    }
}
