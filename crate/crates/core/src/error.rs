use thiserror::Error;

/// Errors raised by the simulator and the protocol layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("label error: {0}")]
    Label(String),

    #[error("invalid coefficients: {0}")]
    Coefficient(String),

    #[error("matrix is not unitary (max |UU^dagger - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("m-parameter solver failed: {0}")]
    Solver(String),

    #[error("Fock truncation exceeded: {0}")]
    Truncation(String),

    #[error("invalid cavity parameters: {0}")]
    CavityParams(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("locality violation: {op} acts on {subsystems:?} owned by {owners:?}")]
    LocalityViolation {
        op: String,
        subsystems: Vec<String>,
        owners: Vec<String>,
    },

    #[error("registry error: {0}")]
    Registry(String),

    #[error("session log error: {0}")]
    Log(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
