use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at t = {t}")]
    NonFinite { t: f64, what: &'static str },

    #[error("invalid gain {name} = {value}: gains must be positive and finite")]
    InvalidGain { name: &'static str, value: f64 },

    #[error("invalid inertia model: {0}")]
    InvalidInertia(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("trace line {line}: {msg}")]
    Trace { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
