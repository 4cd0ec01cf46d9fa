use thiserror::Error;

/// Errors raised while designing, integrating or mapping protocols.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate schedule: {0}")]
    DegenerateSchedule(String),

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("quadrature did not reach tolerance {tol:e} (achieved error estimate {achieved:e})")]
    Accuracy { tol: f64, achieved: f64 },

    #[error("no sign change of Im K over bracket [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    Bracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("sensitivity at nu = {nu} is {qs:e}, above the zero threshold {threshold:e}")]
    SymmetryViolation { nu: f64, qs: f64, threshold: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("coverage: {0}")]
    Coverage(String),

    #[error("aliasing: edge amplitude {amplitude:e} exceeds {threshold:e} at t = {t}")]
    Aliasing { t: f64, amplitude: f64, threshold: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Process exit code for command-line front ends: 1 validation,
    /// 2 numerical, 3 coverage or grid.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::DegenerateSchedule(_)
            | Error::DegenerateGeometry(_)
            | Error::Config(_)
            | Error::Io(_) => 1,
            Error::SolverFailure(_)
            | Error::Accuracy { .. }
            | Error::Bracketing { .. }
            | Error::SymmetryViolation { .. }
            | Error::StepSizeUnderflow { .. } => 2,
            Error::Coverage(_) | Error::Aliasing { .. } | Error::GridMismatch(_) => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {value}")))
    }
}
