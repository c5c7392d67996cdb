use thiserror::Error;

/// Errors produced by the rate engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// E_J(Φ) vanishes (fully frustrated symmetric SQUID).
    #[error("Josephson energy vanishes at flux {flux} (degenerate SQUID bias)")]
    FluxSweetSpotDegenerate { flux: f64 },

    #[error("frequency {omega:.6e} rad/s lies inside the resonance guard around {omega_q:.6e} rad/s")]
    OnResonance { omega: f64, omega_q: f64 },

    #[error("ac-Stark shift must be non-positive, got {0:.6e} rad/s")]
    NonNegativeStark(f64),

    #[error(
        "quadrature did not converge: estimate {estimate:.6e}, error {abs_error:.3e} after {evaluations} evaluations"
    )]
    QuadratureNonConvergent { estimate: f64, abs_error: f64, evaluations: usize },

    #[error("half-phase matrix elements unstable: {0}")]
    TruncationUnstable(String),

    #[error("process is below threshold: {0}")]
    BelowThreshold(String),

    #[error("diagram enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

/// Coarse classification used for process exit codes and per-cell status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParams(_) | Error::Config(_) | Error::Io(_) => ErrorKind::Config,
            _ => ErrorKind::Numeric,
        }
    }

    /// Short snake_case tag written to the CSV status column.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::FluxSweetSpotDegenerate { .. } => "flux_degenerate",
            Error::OnResonance { .. } => "on_resonance",
            Error::NonNegativeStark(_) => "non_negative_stark",
            Error::QuadratureNonConvergent { .. } => "quadrature",
            Error::TruncationUnstable(_) => "truncation_unstable",
            Error::BelowThreshold(_) => "below_threshold",
            Error::BudgetExceeded(_) => "budget_exceeded",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
