use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{operand} is not unitary (max deviation from U†U = I is {deviation:.3e})")]
    NotUnitary { operand: String, deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidMixedStrategy(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid agent: {0}")]
    InvalidAgent(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("equilibrium search did not converge; best-response trace: {trace:?}")]
    NonConvergence { trace: Vec<(usize, usize)> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &str, value: f64, min: f64, max: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name.to_string()));
    }
    if value < min || value > max {
        return Err(Error::OutOfRange {
            name: name.to_string(),
            value,
            min,
            max,
        });
    }
    Ok(())
}
