use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The Gram matrix of the stacked channels is rank deficient or too
    /// ill-conditioned for zero forcing. Callers resample the fading block.
    #[error("singular channel: Gram condition number {condition:.3e} exceeds cap {cap:.1e}")]
    SingularChannel { condition: f64, cap: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("reflection coefficient interval is empty (outage)")]
    Infeasible,

    #[error("user {user} is statically infeasible: rho_c = {rho_c:.6} <= 0")]
    StaticInfeasible { user: usize, rho_c: f64 },

    #[error("too many singular channel blocks: {rejected} rejected for {trials} trials")]
    Rejections { rejected: u64, trials: u64 },

    /// The integration line hits a pole of the Gamma kernel.
    #[error("contour abscissa {abscissa} lies on a pole; try {suggested}")]
    ContourOnPole { abscissa: f64, suggested: f64 },

    #[error("contour error: {0}")]
    Contour(String),

    #[error("accuracy: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy { estimate: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
