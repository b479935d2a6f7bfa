use thiserror::Error;

/// Errors raised by the scattering computations and the sweep driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition of the operation does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The dissipative cavity is driven exactly on resonance without loss.
    #[error("resonant pole: E = omega_c = {energy} with gamma = 0")]
    Pole { energy: f64 },

    /// The linear system defining the scattering amplitudes is singular.
    #[error("singular scattering system: |det| = {magnitude:e} (scale {scale:e})")]
    Singular { magnitude: f64, scale: f64 },

    /// Perfect nonreciprocity needs gamma * xi <= J_c^2.
    #[error("no real optimal phase: gamma*xi = {gamma_xi} exceeds J_c^2 = {jc_sq}")]
    NoRealPhase { gamma_xi: f64, jc_sq: f64 },

    /// The lattice solve did not reproduce its own equations.
    #[error("lattice residual {residual:e} exceeds {limit:e}")]
    Convergence { residual: f64, limit: f64 },

    /// Two results describe different systems or energies.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// Invalid configuration; `field` names the offending entry.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl ScatterError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScatterError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for ScatterError {
    fn from(err: std::io::Error) -> Self {
        ScatterError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;
