use thiserror::Error;

/// Errors raised by state construction, transforms and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("both amplitudes are zero; no state to normalize")]
    ZeroState,

    #[error("label and entangled variables share the name `{0}`")]
    VariableClash(String),

    #[error("variable `{0}` needs two distinct eigenlabels")]
    DegenerateEigenlabels(String),

    #[error("operator positions ({0}, {1}) do not address two distinct creation operators")]
    InvalidPositions(usize, usize),

    #[error("expansions are defined over different mode sets")]
    ModeMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("state does not route one particle to each party: {0}")]
    WrongStateShape(String),

    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("experiment configuration: {0}")]
    Config(String),

    #[error("no coincidences recorded")]
    EmptyCounts,
}

pub type Result<T> = std::result::Result<T, Error>;
