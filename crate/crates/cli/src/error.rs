use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration; `key` names the offending entry.
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] biwave_core::Error),
    /// The perturbation handed to `nonuniqueness` radiates.
    #[error("config-g source is radiating (residuals modal {modal:e}, spectral {spectral:e}, field {field:e})")]
    RadiatingPerturbation { modal: f64, spectral: f64, field: f64 },
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// 2 for internal inconsistencies of the verdict, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(biwave_core::Error::Inconsistent(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
