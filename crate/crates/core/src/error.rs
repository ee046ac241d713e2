use thiserror::Error;

/// Errors reported by geometry construction and evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Block shapes of two vectors (or a vector and its context) disagree.
    #[error("block shape mismatch: expected (p={expected_p}, q={expected_q}), got (p={got_p}, q={got_q})")]
    ShapeMismatch {
        expected_p: usize,
        expected_q: usize,
        got_p: usize,
        got_q: usize,
    },

    /// A sign pattern entry is not exactly +1 or -1.
    #[error("invalid sign pattern: entry {index} is {value}, must be +1 or -1")]
    InvalidSign { index: usize, value: f64 },

    /// A submanifold description violates its validity rules.
    #[error("invalid submanifold: {0}")]
    InvalidSpec(String),

    /// A point does not satisfy the defining radius equations.
    #[error("point off manifold: defining-equation residual {residual:.3e} exceeds {tol:.3e}")]
    OffManifold { residual: f64, tol: f64 },

    /// A vector does not satisfy the tangency equations at the given point.
    #[error("vector not tangent: tangency residual {residual:.3e} exceeds {tol:.3e}")]
    NotTangent { residual: f64, tol: f64 },

    /// A factor radius at the evaluation point is too close to zero for the
    /// frame or structure formulas to be well conditioned.
    #[error("degenerate point: factor radius {radius:.3e} below {min:.3e}")]
    DegenerateRadius { radius: f64, min: f64 },

    /// The requested combination of inputs has no implementation
    /// (e.g. closed forms with a non-uniform sign pattern).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A finite-difference configuration parameter is out of range.
    #[error("finite-difference configuration: {0}")]
    FdConfig(String),
}
