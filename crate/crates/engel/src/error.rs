//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngelError {
    /// Argument outside its valid range (e.g. a non-positive dilation factor).
    #[error("domain error: {0}")]
    Domain(String),

    /// A tangent (multi)vector with every coefficient below the zero
    /// tolerance; not a valid tangent of an immersion.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Jacobian loses rank somewhere on the sampled domain.
    #[error("immersion violation at parameter {param:?}: {detail}")]
    ImmersionViolation { param: Vec<f64>, detail: String },

    /// Quadrature finished without meeting the requested tolerance.
    /// The achieved bracket is carried so callers can still inspect it.
    #[error("tolerance not met: estimate {estimate} with bracket [{lo}, {hi}], requested rel tol {requested}")]
    ToleranceNotMet {
        estimate: f64,
        lo: f64,
        hi: f64,
        requested: f64,
    },

    /// Operation requires a specific parametrization shape (e.g. graph form).
    #[error("shape error: {0}")]
    Shape(String),

    /// Covering grid too coarse relative to the requested scale.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// A documented precondition does not hold (e.g. mixed-degree patch).
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Configuration or submanifold definition file could not be parsed.
    #[error("parse error in {location}: {detail}")]
    Parse { location: String, detail: String },

    /// Referenced submanifold or scenario id is unknown.
    #[error("unknown id: {0}")]
    UnknownId(String),

    /// Oracle certification found a residual above its threshold.
    #[error("certification failure: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, EngelError>;
