use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown config field `{0}`")]
    UnknownField(String),
    #[error("bad value for `{0}`: {1}")]
    BadValue(String, String),
    #[error("expected key=value, got `{0}`")]
    BadAssignment(String),
    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed result row: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] dscm_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
