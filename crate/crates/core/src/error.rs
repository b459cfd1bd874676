use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature did not converge: estimate {value:e} with error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("coincident points: the Green's function is singular at x = y")]
    CoincidentPoints,
    #[error("zero lag: the closed form is singular at tau' = 0")]
    ZeroLag,
    #[error("an f1/|omega| spectrum needs an infrared cutoff on quadrature paths")]
    MissingCutoff,
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("trajectory leaves the half-space z > 0 at tau = {tau}")]
    ExitsDomain { tau: f64 },
    #[error("unsupported window: {0}")]
    UnsupportedWindow(String),
    #[error("no admissible point in the search region")]
    NoAdmissiblePoint,
    #[error("band too narrow: {0}")]
    BandTooNarrow(String),
    #[error("admissibility violated: {0}")]
    Admissibility(String),
    #[error("grid format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
