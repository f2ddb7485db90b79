use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rotation axis is not a unit vector (|e| = {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("Bloch vector is unphysical (|r| = {norm} > 1)")]
    UnphysicalState { norm: f64 },

    #[error(
        "period point {j} does not exist: discriminant {discriminant} <= 0 \
         (the drive phase turns around before reaching 2*pi*{j})"
    )]
    NegativeDiscriminant { j: usize, discriminant: f64 },

    #[error("period index {j} out of range 0..={n}")]
    IndexOutOfRange { j: usize, n: usize },

    #[error("integrator step size underflow at t = {t}: h = {step} below {min_step}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },

    #[error("integrator produced a non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("traces are sampled on different period grids")]
    GridMismatch,

    #[error(
        "Landau-Zener window too narrow: |delta| reaches {got} * u*eta at the edges, \
         at least {required} * u*eta required"
    )]
    WindowTooNarrow { required: f64, got: f64 },

    #[error(
        "resonance peak of `{method}` lies on the edge of the scanned grid; widen the omega0 range"
    )]
    PeakAtBoundary { method: &'static str },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepUnderflow { .. } | Error::NonFinite { .. })
    }
}
