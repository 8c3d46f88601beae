use thiserror::Error;

/// Errors produced by model evaluation, integration, solving and scenario handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A non-finite number reached an operation that requires finite inputs.
    #[error("non-finite {what} passed to {operation}")]
    NonFinite {
        operation: &'static str,
        what: &'static str,
    },

    /// An integration produced a non-finite value; `step` is the step that failed.
    #[error("integration diverged at step {step} (t = {t})")]
    Diverged { step: usize, t: f64 },

    /// A named quantity violates its constraint.
    #[error("{name} = {value} violates {constraint}")]
    InvalidValue {
        name: String,
        value: f64,
        constraint: String,
    },

    /// A per-node array does not have one entry per grid node.
    #[error("array of {found} values does not match the grid ({expected} nodes)")]
    LengthMismatch { expected: usize, found: usize },

    /// The solver grid and the scenario describe different time horizons.
    #[error("grid horizon tf = {grid} does not match scenario tf = {scenario}")]
    HorizonMismatch { grid: f64, scenario: f64 },

    /// A sweep names a parameter that cannot be swept.
    #[error("unknown sweep parameter `{0}` (expected mu, gamma, epsilon or eta)")]
    UnknownParameter(String),

    /// The scenario document could not be parsed.
    #[error("scenario config: {0}")]
    Parse(#[from] Box<toml::de::Error>),

    /// The scenario document parsed but is not usable as given.
    #[error("scenario config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &str, value: f64, constraint: &str) -> Self {
        Error::InvalidValue {
            name: name.to_owned(),
            value,
            constraint: constraint.to_owned(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
