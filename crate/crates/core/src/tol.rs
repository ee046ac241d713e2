//! Default tolerances for the verification suites.
//!
//! Algebraic identities are exact up to f64 rounding; finite-difference
//! checks carry an O(h²) truncation term plus an O(ε/h) cancellation term,
//! which for the default step h = 1e-5 lands near 1e-9 absolute. Every
//! threshold below is a few orders above the expected error so that a
//! violation signals a real defect, not noise.

/// Exact arithmetic (permutations, sign flips, single products).
pub const EXACT: f64 = 1e-12;

/// Pointwise algebraic identities built from a handful of f64 operations
/// (Theorem-style identity suite, oracle/closed-form agreement).
pub const ALGEBRAIC: f64 = 1e-10;

/// Identities with one extra operator composition (triple application of P).
pub const COMPOSED: f64 = 1e-9;

/// Residual of the normality combination N_P - 2 Σ du_α ξ_α at the default
/// finite-difference step. Brackets of composed fields accumulate ~1e-8.
pub const FD_NORMALITY: f64 = 5e-7;

/// Deviation of the finite-difference shape operator from -X/R on the
/// hypersphere; a single central difference of a smooth unit field.
pub const FD_SHAPE_OPERATOR: f64 = 5e-8;

/// Commutation defect of P with a shape operator, finite differences.
pub const FD_COMMUTATION: f64 = 5e-7;

/// Self-adjointness defect of a finite-difference shape operator.
pub const FD_SELF_ADJOINT: f64 = 1e-7;

/// Off-diagonal normal-connection coefficients (analytically zero on all
/// three families).
pub const FD_CONNECTION: f64 = 5e-7;

/// Acceptable residual of the defining radius equations for a point to be
/// treated as on-manifold by structure constructors.
pub const ON_MANIFOLD: f64 = 1e-8;

/// Tangency guard applied to user-supplied vectors before evaluating the
/// induced 1-forms or operator; loose enough for vectors produced by the
/// library itself (tangent to ~1e-12).
pub const TANGENCY_GUARD: f64 = 1e-6;

/// Smallest factor radius at which frames and closed forms are evaluated
/// (off-manifold extension stays clear of the division singularities).
pub const MIN_FACTOR_RADIUS: f64 = 1e-8;

/// Points with |det(I - a²)| at or below this are excluded from normality
/// statistics (nondegeneracy hypothesis of the commutation theorem).
pub const DET_NONDEGENERATE: f64 = 1e-3;
