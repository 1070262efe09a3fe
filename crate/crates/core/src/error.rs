use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Bad user input: parameter ranges, configuration, preconditions.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Evaluation requested outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Indicial equation has a (near-)double root; the two-exponent series
    /// basis degenerates and the plus/minus branches cannot be separated.
    #[error("degenerate indicial roots: discriminant {discriminant:.3e} below {tolerance:.1e}")]
    DegenerateRoots { discriminant: f64, tolerance: f64 },

    /// A recursion denominator vanished while building series coefficients.
    #[error("singular series denominator at m = {m}: |{value:.3e}| < 1e-13")]
    SingularDenominator { m: usize, value: f64 },

    /// Adaptive step control drove the step below the resolvable scale.
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}); system too stiff or singular")]
    StepUnderflow { t: f64, h: f64 },

    /// A regression window did not contain enough trajectory samples.
    #[error("insufficient samples in fit window: found {found}, need {required}")]
    InsufficientSamples { found: usize, required: usize },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical trouble.
    /// Front ends map validation errors to exit code 1 and the rest to 2.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
