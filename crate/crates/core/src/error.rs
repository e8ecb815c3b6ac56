use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, hyperparameters or spec files.
    #[error("config error: {0}")]
    Config(String),
    /// Malformed or unsuitable input data.
    #[error("data error: {0}")]
    Data(String),
    /// A numerical stage could not produce a result.
    #[error("compute error: {0}")]
    Compute(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn compute(msg: impl Into<String>) -> Self {
        Error::Compute(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 = config, 2 = data, 3 = compute.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) => 1,
            Error::Data(_) | Error::Csv(_) | Error::Io { .. } => 2,
            Error::Compute(_) => 3,
        }
    }
}
