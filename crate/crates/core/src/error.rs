use thiserror::Error;

/// Errors produced by the channel model and its numerical back end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid model parameters (violated type invariant).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The Meijer G-function parameter pattern is outside what the evaluator supports.
    #[error("unsupported Meijer G specification: {0}")]
    UnsupportedSpec(String),

    /// A numerical routine could not reach its accuracy target.
    #[error("accuracy target missed in {context}: estimated error {estimate:.3e}")]
    Accuracy { context: String, estimate: f64 },

    /// A root finder found no sign change in its bracket.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// A closed form would need a Meijer G-function above the order cap.
    #[error("closed form needs Meijer G order {order} > cap {cap}; use the {fallback} path")]
    InfeasibleOrder {
        order: usize,
        cap: usize,
        fallback: &'static str,
    },

    /// The rational pair behind a closed form does not match the channel exactly.
    #[error("closed form unavailable: {0}; use the quadrature path or snap the parameters")]
    InexactRational(String),

    /// Leading and next exponents of the near-origin expansion coincide.
    #[error("degenerate exponents in asymptotic expansion: b_k = {b_k}, b_j = {b_j}")]
    DegenerateExponent { b_k: f64, b_j: f64 },

    /// Curve fitting could not produce any valid iterate.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
