use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: matrices must be at least {1}x{1}")]
    InvalidDimension(usize, usize),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} is outside its domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("eigensolver failed to converge for matrix `{id}`")]
    EigenNonConvergence { id: String },

    #[error("characteristic lifetime exceeded: t = {t} >= lifetime {lifetime}")]
    LifetimeExceeded { t: f64, lifetime: f64 },

    #[error("no admissible root: {0}")]
    Infeasible(String),

    #[error("quadrature did not converge (estimate {estimate}, error bound {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("singular denominator in omega at r = {r}, theta = {theta}")]
    OmegaSingular { r: f64, theta: f64 },

    #[error("f_t has a pole at lambda = {0}")]
    Pole(Complex64),

    #[error("series guard violated: x = {x} must exceed {bound}; use a larger x or a smaller t")]
    SeriesGuard { x: f64, bound: f64 },

    #[error("word has {0} blocks, at most {1} are supported")]
    WordTooLong(usize, usize),

    #[error("incompatible bins: {0}")]
    Bins(String),

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("trajectory is incomplete: stopped at t = {reached} before t = {requested}")]
    IncompleteTrajectory { reached: f64, requested: f64 },
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
