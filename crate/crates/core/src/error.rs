use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("evaluation too close to a pole at z = {0:e}")]
    Pole(f64),
    #[error("cos x vanishes (node of the mode function)")]
    Node,
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("period is infinite on the separatrix branch")]
    InfinitePeriod,
    #[error("point lies inside the bifurcation tie band")]
    BifurcationPoint,
    #[error("Fock truncation inadequate: tail mass {0:e}")]
    Truncation(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("spectrum is not Lorentzian (normalized residual {residual:.3})")]
    FitFailure { residual: f64, tau_c: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
