use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid fluid parameters: {0}")]
    InvalidParams(String),

    #[error("r = {r} >= 8/9: phi is not monotone, psi does not exist")]
    MonotonicityViolated { r: f64 },

    #[error("r = {r} >= 2/9: U may vanish, the Reynolds ODE is not well posed (need r < 2/9)")]
    RheologyOutOfRange { r: f64 },

    #[error("{what}: no convergence after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("gap height must be positive, got h = {h}")]
    InvalidGap { h: f64 },

    #[error("invalid gap profile: {0}")]
    InvalidProfile(String),

    #[error("flux Q = {flux:e} unreachable at x = {x}")]
    FluxUnreachable { x: f64, flux: f64 },

    #[error("ODE step-size controller stalled at x = {x} (step {step:e})")]
    StepFailure { x: f64, step: f64 },

    #[error("U = {u:e} >= 0 at x = {x}, q = {q:e}")]
    SignViolation { x: f64, q: f64, u: f64 },

    #[error("z = {z} outside the gap [0, {h}]")]
    OutOfGap { z: f64, h: f64 },

    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),

    #[error("fields were already rescaled (epsilon = {0}); rescale the limit fields instead")]
    AlreadyRescaled(f64),

    #[error("grid too small: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Stable variant name, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::MonotonicityViolated { .. } => "MonotonicityViolated",
            Error::RheologyOutOfRange { .. } => "RheologyOutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidGap { .. } => "InvalidGap",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::FluxUnreachable { .. } => "FluxUnreachable",
            Error::StepFailure { .. } => "StepFailure",
            Error::SignViolation { .. } => "SignViolation",
            Error::OutOfGap { .. } => "OutOfGap",
            Error::InvalidEpsilon(_) => "InvalidEpsilon",
            Error::AlreadyRescaled(_) => "AlreadyRescaled",
            Error::InvalidGrid(_) => "InvalidGrid",
        }
    }
}
