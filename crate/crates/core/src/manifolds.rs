//! The three submanifold families and their pointwise geometry: membership,
//! random point and tangent sampling, orthonormal normal frames, and the
//! tangential projector.
//!
//! Every frame and projection formula is written in terms of the radii of the
//! evaluation point ([`RadiiAtPoint`]), not the nominal radii of the spec.
//! On the manifold the two agree; off the manifold the point-radii version is
//! the smooth extension the finite-difference module differentiates.

use serde::{Deserialize, Serialize};

use crate::ambient::AmbientVector;
use crate::rng::Stream;
use crate::tol;
use crate::{Error, Result};

/// One of the three submanifold families in `E^{2p+q}`.
///
/// * `Hypersphere` — the sphere of radius `R` (codimension 1),
/// * `DoubleProduct` — sphere of radius `r` in the (x,y)-block times sphere
///   of radius `r3` in the z-block (codimension 2),
/// * `TripleProduct` — spheres of radii `r1`, `r2`, `r3` in the x-, y- and
///   z-blocks (codimension 3).
///
/// Derived radii satisfy `r² = r1² + r2²` and `R² = r² + r3²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SubmanifoldSpec {
    Hypersphere {
        p: usize,
        q: usize,
        radius: f64,
    },
    DoubleProduct {
        p: usize,
        q: usize,
        r: f64,
        r3: f64,
    },
    TripleProduct {
        p: usize,
        q: usize,
        r1: f64,
        r2: f64,
        r3: f64,
    },
}

impl SubmanifoldSpec {
    pub fn hypersphere(p: usize, q: usize, radius: f64) -> Result<Self> {
        let spec = SubmanifoldSpec::Hypersphere { p, q, radius };
        spec.validate()?;
        Ok(spec)
    }

    pub fn double_product(p: usize, q: usize, r: f64, r3: f64) -> Result<Self> {
        let spec = SubmanifoldSpec::DoubleProduct { p, q, r, r3 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn triple_product(p: usize, q: usize, r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let spec = SubmanifoldSpec::TripleProduct { p, q, r1, r2, r3 };
        spec.validate()?;
        Ok(spec)
    }

    /// Validity rules: positive finite radii; products need q ≥ 2 and the
    /// triple product needs p ≥ 2, so every factor sphere has a nonempty
    /// tangent space.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "radius {name} must be positive and finite, got {v}"
                )))
            }
        };
        if self.p() == 0 || self.q() == 0 {
            return Err(Error::InvalidSpec(format!(
                "dimensions must be positive, got p={}, q={}",
                self.p(),
                self.q()
            )));
        }
        match *self {
            SubmanifoldSpec::Hypersphere { radius, .. } => positive("R", radius),
            SubmanifoldSpec::DoubleProduct { q, r, r3, .. } => {
                positive("r", r)?;
                positive("r3", r3)?;
                if q < 2 {
                    return Err(Error::InvalidSpec(
                        "double product requires q >= 2".to_string(),
                    ));
                }
                Ok(())
            }
            SubmanifoldSpec::TripleProduct { p, q, r1, r2, r3 } => {
                positive("r1", r1)?;
                positive("r2", r2)?;
                positive("r3", r3)?;
                if p < 2 || q < 2 {
                    return Err(Error::InvalidSpec(
                        "triple product requires p >= 2 and q >= 2".to_string(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn p(&self) -> usize {
        match *self {
            SubmanifoldSpec::Hypersphere { p, .. }
            | SubmanifoldSpec::DoubleProduct { p, .. }
            | SubmanifoldSpec::TripleProduct { p, .. } => p,
        }
    }

    pub fn q(&self) -> usize {
        match *self {
            SubmanifoldSpec::Hypersphere { q, .. }
            | SubmanifoldSpec::DoubleProduct { q, .. }
            | SubmanifoldSpec::TripleProduct { q, .. } => q,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        2 * self.p() + self.q()
    }

    /// Number of defining equations = dimension of the normal space.
    pub fn codimension(&self) -> usize {
        match self {
            SubmanifoldSpec::Hypersphere { .. } => 1,
            SubmanifoldSpec::DoubleProduct { .. } => 2,
            SubmanifoldSpec::TripleProduct { .. } => 3,
        }
    }

    /// Radius of the circumscribed sphere: `‖pt‖` for every point of any
    /// family.
    pub fn circumradius(&self) -> f64 {
        match *self {
            SubmanifoldSpec::Hypersphere { radius, .. } => radius,
            SubmanifoldSpec::DoubleProduct { r, r3, .. } => (r * r + r3 * r3).sqrt(),
            SubmanifoldSpec::TripleProduct { r1, r2, r3, .. } => {
                (r1 * r1 + r2 * r2 + r3 * r3).sqrt()
            }
        }
    }

    pub fn check_point_shape(&self, pt: &AmbientVector) -> Result<()> {
        if pt.p() == self.p() && pt.q() == self.q() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected_p: self.p(),
                expected_q: self.q(),
                got_p: pt.p(),
                got_q: pt.q(),
            })
        }
    }

    /// Residuals of the defining squared-radius equations, one per
    /// codimension.
    pub fn defining_residuals(&self, pt: &AmbientVector) -> Result<Vec<f64>> {
        self.check_point_shape(pt)?;
        let radii = RadiiAtPoint::of(pt);
        Ok(match *self {
            SubmanifoldSpec::Hypersphere { radius, .. } => {
                vec![(radii.circum_sq() - radius * radius).abs()]
            }
            SubmanifoldSpec::DoubleProduct { r, r3, .. } => vec![
                (radii.r_sq() - r * r).abs(),
                (radii.r3_sq() - r3 * r3).abs(),
            ],
            SubmanifoldSpec::TripleProduct { r1, r2, r3, .. } => vec![
                (radii.r1_sq() - r1 * r1).abs(),
                (radii.r2_sq() - r2 * r2).abs(),
                (radii.r3_sq() - r3 * r3).abs(),
            ],
        })
    }

    /// True iff every defining radius equation holds within `tol`.
    pub fn contains(&self, pt: &AmbientVector, tol: f64) -> Result<bool> {
        Ok(self
            .defining_residuals(pt)?
            .into_iter()
            .all(|res| res <= tol))
    }

    pub fn ensure_on_manifold(&self, pt: &AmbientVector, tol: f64) -> Result<()> {
        let worst = self
            .defining_residuals(pt)?
            .into_iter()
            .fold(0.0_f64, f64::max);
        if worst <= tol {
            Ok(())
        } else {
            Err(Error::OffManifold {
                residual: worst,
                tol,
            })
        }
    }

    /// Max absolute violation of the family tangency equations at `pt`.
    pub fn tangency_residual(&self, pt: &AmbientVector, v: &AmbientVector) -> Result<f64> {
        self.check_point_shape(pt)?;
        pt.check_shape(v)?;
        let xdot: f64 = pt.x().iter().zip(v.x()).map(|(a, b)| a * b).sum();
        let ydot: f64 = pt.y().iter().zip(v.y()).map(|(a, b)| a * b).sum();
        let zdot: f64 = pt.z().iter().zip(v.z()).map(|(a, b)| a * b).sum();
        Ok(match self {
            SubmanifoldSpec::Hypersphere { .. } => (xdot + ydot + zdot).abs(),
            SubmanifoldSpec::DoubleProduct { .. } => (xdot + ydot).abs().max(zdot.abs()),
            SubmanifoldSpec::TripleProduct { .. } => {
                xdot.abs().max(ydot.abs()).max(zdot.abs())
            }
        })
    }

    /// True iff all family tangency equations hold within `tol`.
    pub fn is_tangent(&self, pt: &AmbientVector, v: &AmbientVector, tol: f64) -> Result<bool> {
        Ok(self.tangency_residual(pt, v)? <= tol)
    }

    pub(crate) fn ensure_tangent(
        &self,
        pt: &AmbientVector,
        v: &AmbientVector,
        tol: f64,
    ) -> Result<()> {
        let residual = self.tangency_residual(pt, v)?;
        if residual <= tol {
            Ok(())
        } else {
            Err(Error::NotTangent { residual, tol })
        }
    }
}

/// The squared block radii and the mixed sum σ = Σ xⁱyⁱ of a point.
///
/// All closed-form structure coefficients read these values instead of
/// recomputing coordinate sums ad hoc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiAtPoint {
    r1_sq: f64,
    r2_sq: f64,
    r3_sq: f64,
    sigma: f64,
}

impl RadiiAtPoint {
    pub fn of(pt: &AmbientVector) -> Self {
        let r1_sq = pt.x().iter().map(|v| v * v).sum();
        let r2_sq = pt.y().iter().map(|v| v * v).sum();
        let r3_sq = pt.z().iter().map(|v| v * v).sum();
        let sigma = pt.x().iter().zip(pt.y()).map(|(a, b)| a * b).sum();
        RadiiAtPoint {
            r1_sq,
            r2_sq,
            r3_sq,
            sigma,
        }
    }

    pub fn r1_sq(&self) -> f64 {
        self.r1_sq
    }

    pub fn r2_sq(&self) -> f64 {
        self.r2_sq
    }

    pub fn r3_sq(&self) -> f64 {
        self.r3_sq
    }

    /// r² = r1² + r2², the squared radius of the (x,y)-block.
    pub fn r_sq(&self) -> f64 {
        self.r1_sq + self.r2_sq
    }

    /// R² = r² + r3², the squared distance from the origin.
    pub fn circum_sq(&self) -> f64 {
        self.r_sq() + self.r3_sq
    }

    pub fn r1(&self) -> f64 {
        self.r1_sq.sqrt()
    }

    pub fn r2(&self) -> f64 {
        self.r2_sq.sqrt()
    }

    pub fn r3(&self) -> f64 {
        self.r3_sq.sqrt()
    }

    pub fn r(&self) -> f64 {
        self.r_sq().sqrt()
    }

    pub fn circum(&self) -> f64 {
        self.circum_sq().sqrt()
    }

    /// σ = Σ xⁱyⁱ; bounded by r1·r2 (Cauchy-Schwarz).
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The factor radii the family's frame formulas divide by.
    pub(crate) fn check_family_radii(&self, spec: &SubmanifoldSpec) -> Result<()> {
        let min = tol::MIN_FACTOR_RADIUS;
        let check = |radius: f64| -> Result<()> {
            if radius > min {
                Ok(())
            } else {
                Err(Error::DegenerateRadius { radius, min })
            }
        };
        match spec {
            SubmanifoldSpec::Hypersphere { .. } => check(self.circum()),
            SubmanifoldSpec::DoubleProduct { .. } => {
                check(self.r())?;
                check(self.r3())
            }
            SubmanifoldSpec::TripleProduct { .. } => {
                check(self.r1())?;
                check(self.r2())?;
                check(self.r3())
            }
        }
    }
}

/// Draw a uniform point on the sphere of the given radius in `n` dimensions
/// (Gaussian normalization).
fn sphere_point(stream: &mut Stream, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let g = stream.gaussians(n);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.iter().map(|v| v * radius / norm).collect();
        }
    }
}

/// Sample a point of the submanifold, uniform per factor sphere.
///
/// One independent substream per factor, derived from a single draw of the
/// caller's stream, so the result depends only on the stream state at entry.
pub fn sample_point(spec: &SubmanifoldSpec, stream: &mut Stream) -> Result<AmbientVector> {
    spec.validate()?;
    let base = Stream::new(stream.next_u64());
    let p = spec.p();
    let q = spec.q();
    match *spec {
        SubmanifoldSpec::Hypersphere { radius, .. } => {
            let flat = sphere_point(&mut base.substream(0), 2 * p + q, radius);
            AmbientVector::from_flat(p, q, &flat)
        }
        SubmanifoldSpec::DoubleProduct { r, r3, .. } => {
            let xy = sphere_point(&mut base.substream(0), 2 * p, r);
            let z = sphere_point(&mut base.substream(1), q, r3);
            AmbientVector::new(xy[..p].to_vec(), xy[p..].to_vec(), z)
        }
        SubmanifoldSpec::TripleProduct { r1, r2, r3, .. } => {
            let x = sphere_point(&mut base.substream(0), p, r1);
            let y = sphere_point(&mut base.substream(1), p, r2);
            let z = sphere_point(&mut base.substream(2), q, r3);
            AmbientVector::new(x, y, z)
        }
    }
}

/// The orthonormal normal frame at a point, computed from the point's own
/// radii. No on-manifold check; callers are responsible for the domain.
pub(crate) fn normal_frame_extended(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
) -> Result<Vec<AmbientVector>> {
    spec.check_point_shape(pt)?;
    let radii = RadiiAtPoint::of(pt);
    radii.check_family_radii(spec)?;
    let circum = radii.circum();

    // N1: the radial unit field, normal to every family.
    let n1 = pt.scaled(1.0 / circum);
    let mut frame = vec![n1];

    if spec.codimension() >= 2 {
        // N2 = (1/R)((r3/r) x, (r3/r) y, -(r/r3) z)
        let r = radii.r();
        let r3 = radii.r3();
        let cx = r3 / (r * circum);
        let cz = -r / (r3 * circum);
        frame.push(AmbientVector::new(
            pt.x().iter().map(|v| cx * v).collect(),
            pt.y().iter().map(|v| cx * v).collect(),
            pt.z().iter().map(|v| cz * v).collect(),
        )?);
    }

    if spec.codimension() >= 3 {
        // N3 = (1/r)((r2/r1) x, -(r1/r2) y, 0)
        let r = radii.r();
        let r1 = radii.r1();
        let r2 = radii.r2();
        let cx = r2 / (r1 * r);
        let cy = -r1 / (r2 * r);
        frame.push(AmbientVector::new(
            pt.x().iter().map(|v| cx * v).collect(),
            pt.y().iter().map(|v| cy * v).collect(),
            vec![0.0; pt.q()],
        )?);
    }

    Ok(frame)
}

/// The orthonormal normal frame (N₁), (N₁, N₂) or (N₁, N₂, N₃) at an
/// on-manifold point.
pub fn normal_frame(spec: &SubmanifoldSpec, pt: &AmbientVector) -> Result<Vec<AmbientVector>> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    normal_frame_extended(spec, pt)
}

/// v minus its components along the (extended) normal frame.
pub(crate) fn tangent_project_extended(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    v: &AmbientVector,
) -> Result<AmbientVector> {
    pt.check_shape(v)?;
    let frame = normal_frame_extended(spec, pt)?;
    let mut out = v.clone();
    for n in &frame {
        let coeff = out.dot(n);
        out = out.add_scaled(-coeff, n);
    }
    Ok(out)
}

/// Orthogonal projection onto the tangent space at an on-manifold point:
/// `v − Σ_α ⟨v, N_α⟩ N_α`.
pub fn tangent_project(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    v: &AmbientVector,
) -> Result<AmbientVector> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    tangent_project_extended(spec, pt, v)
}

/// A unit tangent vector at `pt`: a projected standard Gaussian, resampled if
/// the projection is degenerate.
pub fn sample_tangent(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    stream: &mut Stream,
) -> Result<AmbientVector> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    loop {
        let raw = AmbientVector::new(
            stream.gaussians(spec.p()),
            stream.gaussians(spec.p()),
            stream.gaussians(spec.q()),
        )?;
        let projected = tangent_project_extended(spec, pt, &raw)?;
        let norm = projected.norm();
        if norm >= 1e-8 {
            return Ok(projected.scaled(1.0 / norm));
        }
    }
}
