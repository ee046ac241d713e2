//! The flat ambient space `E^{2p+q}`, its inner product, and the block-swap
//! operator `P̃(x, y, z) = (y, x, s∘z)`.
//!
//! Points and tangent vectors share one type: the tangent space of Euclidean
//! space is identified with the space itself, and tangency to a submanifold
//! is a predicate (see [`crate::manifolds`]), not a type distinction.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An element of `E^{2p+q}` stored as three coordinate blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientVector {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl AmbientVector {
    /// Build from blocks; the x- and y-blocks must have equal length.
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::ShapeMismatch {
                expected_p: x.len(),
                expected_q: z.len(),
                got_p: y.len(),
                got_q: z.len(),
            });
        }
        Ok(AmbientVector { x, y, z })
    }

    pub fn zeros(p: usize, q: usize) -> Self {
        AmbientVector {
            x: vec![0.0; p],
            y: vec![0.0; p],
            z: vec![0.0; q],
        }
    }

    /// Split a flat coordinate list of length 2p+q into blocks.
    pub fn from_flat(p: usize, q: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != 2 * p + q {
            return Err(Error::ShapeMismatch {
                expected_p: p,
                expected_q: q,
                got_p: coords.len().saturating_sub(q) / 2,
                got_q: coords.len().saturating_sub(2 * p),
            });
        }
        Ok(AmbientVector {
            x: coords[..p].to_vec(),
            y: coords[p..2 * p].to_vec(),
            z: coords[2 * p..].to_vec(),
        })
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }

    pub fn q(&self) -> usize {
        self.z.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.p() + self.q()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn same_shape(&self, other: &AmbientVector) -> bool {
        self.p() == other.p() && self.q() == other.q()
    }

    pub fn check_shape(&self, other: &AmbientVector) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_p: self.p(),
                expected_q: self.q(),
                got_p: other.p(),
                got_q: other.q(),
            })
        }
    }

    /// All 2p+q coordinates in (x, y, z) order.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.x
            .iter()
            .chain(self.y.iter())
            .chain(self.z.iter())
            .copied()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Euclidean inner product; shapes unchecked (internal use).
    pub(crate) fn dot(&self, other: &AmbientVector) -> f64 {
        debug_assert!(self.same_shape(other));
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn inf_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> AmbientVector {
        AmbientVector {
            x: self.x.iter().map(|v| c * v).collect(),
            y: self.y.iter().map(|v| c * v).collect(),
            z: self.z.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &AmbientVector) -> AmbientVector {
        debug_assert!(self.same_shape(other));
        AmbientVector {
            x: zip_with(&self.x, &other.x, |a, b| a + b),
            y: zip_with(&self.y, &other.y, |a, b| a + b),
            z: zip_with(&self.z, &other.z, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &AmbientVector) -> AmbientVector {
        debug_assert!(self.same_shape(other));
        AmbientVector {
            x: zip_with(&self.x, &other.x, |a, b| a - b),
            y: zip_with(&self.y, &other.y, |a, b| a - b),
            z: zip_with(&self.z, &other.z, |a, b| a - b),
        }
    }

    /// self + c·other, the workhorse of frame subtractions.
    pub fn add_scaled(&self, c: f64, other: &AmbientVector) -> AmbientVector {
        debug_assert!(self.same_shape(other));
        AmbientVector {
            x: zip_with(&self.x, &other.x, |a, b| a + c * b),
            y: zip_with(&self.y, &other.y, |a, b| a + c * b),
            z: zip_with(&self.z, &other.z, |a, b| a + c * b),
        }
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b.iter()).map(|(&x, &y)| f(x, y)).collect()
}

/// The per-coordinate signs (ε₁, …, ε_q) applied to the z-block by [`ptilde`].
///
/// The uniform pattern (ε, …, ε) recovers the single-sign operator; no
/// separate code path exists for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPattern(Vec<f64>);

impl SignPattern {
    /// Validates that every entry is exactly ±1.
    pub fn new(signs: Vec<f64>) -> Result<Self> {
        for (index, &value) in signs.iter().enumerate() {
            if value != 1.0 && value != -1.0 {
                return Err(Error::InvalidSign { index, value });
            }
        }
        Ok(SignPattern(signs))
    }

    pub fn uniform(q: usize, sign: f64) -> Result<Self> {
        SignPattern::new(vec![sign; q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[f64] {
        &self.0
    }

    /// The common value if the pattern is uniform, else `None`.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = *self.0.first()?;
        self.0.iter().all(|&s| s == first).then_some(first)
    }
}

/// The almost product operator: swaps the x- and y-blocks and multiplies each
/// z-coordinate by its sign. An involution, computed without rounding.
pub fn ptilde(v: &AmbientVector, s: &SignPattern) -> Result<AmbientVector> {
    if s.len() != v.q() {
        return Err(Error::ShapeMismatch {
            expected_p: v.p(),
            expected_q: v.q(),
            got_p: v.p(),
            got_q: s.len(),
        });
    }
    Ok(AmbientVector {
        x: v.y.clone(),
        y: v.x.clone(),
        z: v
            .z
            .iter()
            .zip(s.signs().iter())
            .map(|(z, sign)| sign * z)
            .collect(),
    })
}

/// Euclidean inner product over all 2p+q coordinates.
pub fn inner(u: &AmbientVector, v: &AmbientVector) -> Result<f64> {
    u.check_shape(v)?;
    Ok(u.dot(v))
}
