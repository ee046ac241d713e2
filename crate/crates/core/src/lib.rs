//! Induced almost product structures on spheres and products of spheres.
//!
//! The ambient space is `E^{2p+q}` with coordinates split into an x-block and
//! y-block of length `p` and a z-block of length `q`. The block-swap operator
//! `P̃(x, y, z) = (y, x, ε∘z)` (with a ±1 sign per z-coordinate) is an almost
//! product structure compatible with the Euclidean inner product. Restricting
//! it to a hypersphere, a product of two spheres, or a product of three
//! spheres induces a structure `(P, ξ_α, u_α, a)` on the submanifold: `P` is
//! the tangential part of `P̃`, the `ξ_α` are tangent fields, the `u_α` are
//! 1-forms and `a` is a symmetric codimension-sized matrix.
//!
//! The crate provides two independent routes to that induced structure:
//!
//! * [`induced::closed_form_structure`] — the per-family closed formulas,
//! * [`induced::oracle_structure`] — the generic tangential/normal
//!   decomposition `a_{αβ} = ⟨P̃N_α, N_β⟩`, `ξ_α = P̃N_α − Σ_β a_{αβ}N_β`,
//!
//! and numerical verification on top of them: the algebraic identity suite in
//! [`verify`] and finite-difference differential checks (Nijenhuis torsion,
//! exterior derivatives, Weingarten operators, normal connection) in
//! [`normality`]. All sampling is driven by deterministic splittable streams
//! ([`rng::Stream`]) so that reports are reproducible byte for byte.

pub mod ambient;
pub mod induced;
pub mod manifolds;
pub mod matrix;
pub mod normality;
pub mod rng;
pub mod tol;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
