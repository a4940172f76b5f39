use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `h1` is the zero vector, so no projection basis exists.
    #[error("degenerate channel: user-to-H-AP channel has zero norm")]
    DegenerateChannel,

    #[error("time split {0} is outside the open interval (0, 1)")]
    TauOutOfRange(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },

    #[error("argument {value} is outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("channel vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    /// `||h2||^2 - b^2` came out negative by more than rounding can explain.
    #[error("projection residual is negative ({0:e}); inconsistent channel")]
    NegativeRadicand(f64),

    #[error("closed form requires at least two H-AP antennas (N = {0})")]
    NeedsTwoAntennas(usize),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
