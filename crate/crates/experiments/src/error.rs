use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse configuration: {0}")]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Core(#[from] hydroqubo::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 when the problem does not fit the hardware model.
    pub fn exit_code(&self) -> i32 {
        use hydroqubo::Error as E;
        match self {
            CliError::Core(E::Capacity(_) | E::Embedding(_)) => 3,
            CliError::Config(_) | CliError::Toml(_) | CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
