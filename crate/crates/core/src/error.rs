use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the numeric modules.
///
/// Parse errors for the expression grammar carry positional data and live in
/// [`crate::expr::ParseError`]; they are wrapped here when they cross module
/// boundaries.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters outside the family an operation supports.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested tolerance. The achieved error bound is reported.
    #[error("quadrature did not converge: achieved bound {achieved:.3e}, requested {requested:.3e}")]
    QuadratureAccuracy { achieved: f64, requested: f64 },

    /// A truncated series hit the hard cap before accumulating the required
    /// basis mass; the result past this point has no trustworthy tail bound.
    #[error("series truncation saturated at hard cap {cap}")]
    Saturated { cap: u64 },

    /// Expression parsing failed.
    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),

    /// Expression evaluation failed (division by zero at runtime).
    #[error("evaluation error: {0}")]
    Eval(String),
}
