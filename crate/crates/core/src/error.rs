use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value; `key` is the dotted path of the offending field.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("failed to parse config: {0}")]
    ConfigSyntax(String),

    #[error("profile has {got} actions but the deployment has {expected} BSSs")]
    ProfileLength { expected: usize, got: usize },

    #[error("joint action space of {size} profiles exceeds the enumeration budget of {budget}")]
    EnumerationBudget { size: u128, budget: u128 },

    #[error("reward {value} outside [0, 1]")]
    RewardOutOfRange { value: f64 },

    #[error("action index {index} out of range for {count} actions")]
    ActionIndex { index: usize, count: usize },

    #[error("hypothetical reward of the played action ({hypothetical}) differs from the actual reward ({actual})")]
    PlayedRewardMismatch { actual: f64, hypothetical: f64 },

    #[error("invalid game: {0}")]
    Game(String),

    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
