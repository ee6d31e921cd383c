use thiserror::Error;

/// Failures surfaced by the numerical operators.
///
/// Points are reported as `(x, y)` pairs converted to `f64` so the error type
/// stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("number ({re}, {im}) lies on the null-cone and has no inverse")]
    NotInvertible { re: f64, im: f64 },
    #[error("point ({x}, {y}) is outside the domain")]
    Domain { x: f64, y: f64 },
    #[error("difference stencil at ({x}, {y}) crosses a puncture")]
    Stencil { x: f64, y: f64 },
    #[error("generator is not positive at ({x}, {y})")]
    Positivity { x: f64, y: f64 },
    #[error("field is not conservative: residual {residual:e} at ({x}, {y})")]
    NotConservative { x: f64, y: f64, residual: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("contexts do not share a Schrödinger equation: {0}")]
    ContextMismatch(String),
    #[error("degenerate generating pair at ({x}, {y})")]
    DegeneratePair { x: f64, y: f64 },
    #[error("successor is not a generating pair: Im(conj(F) G) = {value:e} at ({x}, {y})")]
    NotGeneratingPair { x: f64, y: f64, value: f64 },
    #[error("generating sequence has no pair with index {0}")]
    SequenceExhausted(i64),
    #[error("least-squares fit failed: {0}")]
    Fit(String),
    #[error("integration path passes within {clearance:e} of the pole at ({x}, {y})")]
    PathThroughPole { x: f64, y: f64, clearance: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
