use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the supported envelope of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(
        "k = {wavenumber} is too close to a Neumann eigenvalue of the disk: \
         |J_{order}'(kR)| = {value:.3e}; perturb the frequency slightly"
    )]
    NearEigenvalue {
        wavenumber: f64,
        order: usize,
        value: f64,
    },

    #[error("evaluation point coincides with the source point (|x - z| = {distance:.3e})")]
    Coincident { distance: f64 },

    #[error(
        "sampling point ({x:.6}, {y:.6}) is {distance:.3e} m from the boundary, \
         closer than the node spacing {required:.3e} m"
    )]
    NearBoundary {
        x: f64,
        y: f64,
        distance: f64,
        required: f64,
    },

    #[error("scene validation failed: {0}")]
    Scene(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
