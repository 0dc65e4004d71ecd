use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("eigen-solver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64 },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("singular geometry: {factor} vanishes")]
    SingularGeometry { factor: &'static str },

    #[error("phonon energy {hbar_omega0_mev} meV does not exceed the localization energy {e_loc_mev} meV")]
    BelowThreshold { hbar_omega0_mev: f64, e_loc_mev: f64 },

    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(&'static str),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
