//! The induced structure `(P, ξ_α, u_α, a)` on a submanifold, computed two
//! independent ways.
//!
//! [`oracle_structure`] uses only the definitional decomposition:
//! `a_{αβ} = ⟨P̃N_α, N_β⟩` and `ξ_α = P̃N_α − Σ_β a_{αβ} N_β`, with
//! `u_α(X) = ⟨X, ξ_α⟩` and `PX = P̃X − Σ_α u_α(X) N_α`. It works for any
//! sign pattern and knows nothing about the families.
//!
//! [`closed_form_structure`] fills the same data from the per-family printed
//! formulas (the artifact under test). Those formulas are stated for a
//! uniform sign only; a mixed pattern is rejected as unsupported.
//!
//! The two routes must agree to ~1e-10 everywhere; the test suites enforce
//! exactly that.

use crate::ambient::{ptilde, AmbientVector, SignPattern};
use crate::manifolds::{normal_frame_extended, RadiiAtPoint, SubmanifoldSpec};
use crate::matrix::SmallMatrix;
use crate::tol;
use crate::{Error, Result};

/// Which route produced a structure. Closed-form structures also evaluate
/// `u_α` and `P` through the printed scalar formulas; oracle structures
/// evaluate them through the stored frame and `ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

/// The induced structure at one point: the symmetric matrix `a`, the tangent
/// fields `ξ_α`, the normal frame they were built against, and evaluators
/// for `u_α` and `P`.
#[derive(Clone, Debug)]
pub struct InducedStructure {
    spec: SubmanifoldSpec,
    signs: SignPattern,
    pt: AmbientVector,
    radii: RadiiAtPoint,
    frame: Vec<AmbientVector>,
    a: SmallMatrix,
    xi: Vec<AmbientVector>,
    provenance: Provenance,
}

impl InducedStructure {
    pub fn spec(&self) -> &SubmanifoldSpec {
        &self.spec
    }

    pub fn signs(&self) -> &SignPattern {
        &self.signs
    }

    pub fn point(&self) -> &AmbientVector {
        &self.pt
    }

    pub fn radii(&self) -> &RadiiAtPoint {
        &self.radii
    }

    pub fn frame(&self) -> &[AmbientVector] {
        &self.frame
    }

    /// The codimension-sized structure matrix.
    pub fn a(&self) -> &SmallMatrix {
        &self.a
    }

    pub fn xi(&self) -> &[AmbientVector] {
        &self.xi
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn codimension(&self) -> usize {
        self.xi.len()
    }

    /// det(I − a²), the nondegeneracy quantity of the commutation theorem.
    pub fn det_i_minus_a_sq(&self) -> f64 {
        let c = self.a.dim();
        SmallMatrix::identity(c).sub(&self.a.mul(&self.a)).det()
    }

    /// The 1-forms (u_α(X))_α of a tangent vector X.
    pub fn u_form(&self, x: &AmbientVector) -> Result<Vec<f64>> {
        self.spec.ensure_tangent(&self.pt, x, tol::TANGENCY_GUARD)?;
        Ok(self.u_unchecked(x))
    }

    /// The tangential part of P̃X for a tangent vector X.
    pub fn p_apply(&self, x: &AmbientVector) -> Result<AmbientVector> {
        self.spec.ensure_tangent(&self.pt, x, tol::TANGENCY_GUARD)?;
        Ok(self.p_unchecked(x))
    }

    /// u_α without the tangency guard (used on vectors the library itself
    /// produced, and off-manifold by the finite-difference module).
    pub(crate) fn u_unchecked(&self, x: &AmbientVector) -> Vec<f64> {
        match self.provenance {
            Provenance::Oracle => self.xi.iter().map(|xi| x.dot(xi)).collect(),
            Provenance::ClosedForm => self.u_closed_form(x),
        }
    }

    pub(crate) fn p_unchecked(&self, x: &AmbientVector) -> AmbientVector {
        match self.provenance {
            Provenance::Oracle => {
                let mut out = ptilde(x, &self.signs).expect("shapes fixed at construction");
                for (alpha, n) in self.frame.iter().enumerate() {
                    let u = x.dot(&self.xi[alpha]);
                    out = out.add_scaled(-u, n);
                }
                out
            }
            Provenance::ClosedForm => self.p_closed_form(x),
        }
    }

    /// The printed scalar formulas for u_α, per family.
    fn u_closed_form(&self, x: &AmbientVector) -> Vec<f64> {
        let eps = self
            .signs
            .uniform_value()
            .expect("closed forms are constructed only for uniform signs");
        let radii = &self.radii;
        let circum = radii.circum();
        let tau = mixed_tau(&self.pt, x);
        match self.spec {
            SubmanifoldSpec::Hypersphere { .. } => {
                let zdot: f64 = self.pt.z().iter().zip(x.z()).map(|(a, b)| a * b).sum();
                vec![(tau + eps * zdot) / circum]
            }
            SubmanifoldSpec::DoubleProduct { .. } => {
                let r = radii.r();
                let r3 = radii.r3();
                vec![tau / circum, r3 * tau / (r * circum)]
            }
            SubmanifoldSpec::TripleProduct { .. } => {
                let r = radii.r();
                let r1 = radii.r1();
                let r2 = radii.r2();
                let r3 = radii.r3();
                let xdot_y: f64 = self.pt.x().iter().zip(x.y()).map(|(a, b)| a * b).sum();
                let ydot_x: f64 = self.pt.y().iter().zip(x.x()).map(|(a, b)| a * b).sum();
                vec![
                    tau / circum,
                    r3 * tau / (r * circum),
                    ((r2 / r1) * xdot_y - (r1 / r2) * ydot_x) / r,
                ]
            }
        }
    }

    /// The printed formulas for the tangential part of P̃X, per family.
    fn p_closed_form(&self, x: &AmbientVector) -> AmbientVector {
        let eps = self
            .signs
            .uniform_value()
            .expect("closed forms are constructed only for uniform signs");
        let radii = &self.radii;
        let pt = &self.pt;
        match self.spec {
            SubmanifoldSpec::Hypersphere { .. } => {
                // (Yⁱ − (ū/R)xⁱ, Xⁱ − (ū/R)yⁱ, εZʲ − (ū/R)zʲ)
                let u = self.u_closed_form(x)[0];
                let c = u / radii.circum();
                AmbientVector::new(
                    x.y().iter().zip(pt.x()).map(|(b, a)| b - c * a).collect(),
                    x.x().iter().zip(pt.y()).map(|(b, a)| b - c * a).collect(),
                    x.z().iter().zip(pt.z()).map(|(b, a)| eps * b - c * a).collect(),
                )
                .expect("shapes fixed at construction")
            }
            SubmanifoldSpec::DoubleProduct { .. } => {
                // (Yⁱ − (τ/r²)xⁱ, Xⁱ − (τ/r²)yⁱ, εZʲ)
                let c = mixed_tau(pt, x) / radii.r_sq();
                AmbientVector::new(
                    x.y().iter().zip(pt.x()).map(|(b, a)| b - c * a).collect(),
                    x.x().iter().zip(pt.y()).map(|(b, a)| b - c * a).collect(),
                    x.z().iter().map(|z| eps * z).collect(),
                )
                .expect("shapes fixed at construction")
            }
            SubmanifoldSpec::TripleProduct { .. } => {
                // (Yⁱ − (Σxᵏ Yᵏ/r1²)xⁱ, Xⁱ − (Σyᵏ Xᵏ/r2²)yⁱ, εZʲ)
                let xdot_y: f64 = pt.x().iter().zip(x.y()).map(|(a, b)| a * b).sum();
                let ydot_x: f64 = pt.y().iter().zip(x.x()).map(|(a, b)| a * b).sum();
                let cx = xdot_y / radii.r1_sq();
                let cy = ydot_x / radii.r2_sq();
                AmbientVector::new(
                    x.y().iter().zip(pt.x()).map(|(b, a)| b - cx * a).collect(),
                    x.x().iter().zip(pt.y()).map(|(b, a)| b - cy * a).collect(),
                    x.z().iter().map(|z| eps * z).collect(),
                )
                .expect("shapes fixed at construction")
            }
        }
    }
}

/// τ = Σ (xⁱYⁱ + yⁱXⁱ), the mixed pairing of a point and a vector.
fn mixed_tau(pt: &AmbientVector, x: &AmbientVector) -> f64 {
    let a: f64 = pt.x().iter().zip(x.y()).map(|(a, b)| a * b).sum();
    let b: f64 = pt.y().iter().zip(x.x()).map(|(a, b)| a * b).sum();
    a + b
}

fn check_signs(spec: &SubmanifoldSpec, signs: &SignPattern) -> Result<()> {
    if signs.len() != spec.q() {
        return Err(Error::ShapeMismatch {
            expected_p: spec.p(),
            expected_q: spec.q(),
            got_p: spec.p(),
            got_q: signs.len(),
        });
    }
    Ok(())
}

/// Generic decomposition at a point, no family formulas involved. Also valid
/// slightly off-manifold (the frame extends smoothly); the public entry
/// checks membership first.
pub(crate) fn oracle_structure_extended(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    signs: &SignPattern,
) -> Result<InducedStructure> {
    check_signs(spec, signs)?;
    let frame = normal_frame_extended(spec, pt)?;
    let c = frame.len();
    let mut a = SmallMatrix::zeros(c);
    let p_frame: Vec<AmbientVector> = frame
        .iter()
        .map(|n| ptilde(n, signs))
        .collect::<Result<_>>()?;
    for (alpha, pn) in p_frame.iter().enumerate() {
        for (beta, n) in frame.iter().enumerate() {
            a.set(alpha, beta, pn.dot(n));
        }
    }
    let xi: Vec<AmbientVector> = p_frame
        .iter()
        .enumerate()
        .map(|(alpha, pn)| {
            let mut out = pn.clone();
            for (beta, n) in frame.iter().enumerate() {
                out = out.add_scaled(-a.get(alpha, beta), n);
            }
            out
        })
        .collect();
    Ok(InducedStructure {
        spec: spec.clone(),
        signs: signs.clone(),
        pt: pt.clone(),
        radii: RadiiAtPoint::of(pt),
        frame,
        a,
        xi,
        provenance: Provenance::Oracle,
    })
}

/// The formula-free decomposition oracle at an on-manifold point.
pub fn oracle_structure(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    signs: &SignPattern,
) -> Result<InducedStructure> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    oracle_structure_extended(spec, pt, signs)
}

/// Closed-form structure from the per-family printed formulas; uniform signs
/// only. Also valid slightly off-manifold.
pub(crate) fn closed_form_structure_extended(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    signs: &SignPattern,
) -> Result<InducedStructure> {
    check_signs(spec, signs)?;
    let eps = signs.uniform_value().ok_or_else(|| {
        Error::Unsupported(
            "closed forms are stated for a uniform sign pattern only; use the oracle".to_string(),
        )
    })?;
    let frame = normal_frame_extended(spec, pt)?;
    let radii = RadiiAtPoint::of(pt);
    let sigma = radii.sigma();
    let circum_sq = radii.circum_sq();
    let circum = radii.circum();

    let (a, xi) = match spec {
        SubmanifoldSpec::Hypersphere { .. } => {
            // a₁₁ = (2σ + ε r3²)/R²
            let a11 = (2.0 * sigma + eps * radii.r3_sq()) / circum_sq;
            let a = SmallMatrix::from_rows(&[vec![a11]]);
            // ξ̄ = (1/R)(y − a₁₁ x, x − a₁₁ y, ((ε r² − 2σ)/R²) z)
            let cz = (eps * radii.r_sq() - 2.0 * sigma) / circum_sq;
            let xi = AmbientVector::new(
                pt.y()
                    .iter()
                    .zip(pt.x())
                    .map(|(b, a_)| (b - a11 * a_) / circum)
                    .collect(),
                pt.x()
                    .iter()
                    .zip(pt.y())
                    .map(|(b, a_)| (b - a11 * a_) / circum)
                    .collect(),
                pt.z().iter().map(|z| cz * z / circum).collect(),
            )?;
            (a, vec![xi])
        }
        SubmanifoldSpec::DoubleProduct { .. } => {
            let r_sq = radii.r_sq();
            let r = radii.r();
            let r3 = radii.r3();
            let a11 = (2.0 * sigma + eps * radii.r3_sq()) / circum_sq;
            let a12 = (2.0 * sigma - eps * r_sq) * r3 / (r * circum_sq);
            let a22 = (2.0 * sigma * radii.r3_sq() + eps * r_sq * r_sq) / (r_sq * circum_sq);
            let a = SmallMatrix::from_rows(&[vec![a11, a12], vec![a12, a22]]);
            // ξ̂₁ = (1/R)(y − (2σ/r²)x, x − (2σ/r²)y, 0), ξ̂₂ = (r3/(rR)) · same
            let c = 2.0 * sigma / r_sq;
            let base = AmbientVector::new(
                pt.y().iter().zip(pt.x()).map(|(b, a_)| b - c * a_).collect(),
                pt.x().iter().zip(pt.y()).map(|(b, a_)| b - c * a_).collect(),
                vec![0.0; pt.q()],
            )?;
            let xi1 = base.scaled(1.0 / circum);
            let xi2 = base.scaled(r3 / (r * circum));
            (a, vec![xi1, xi2])
        }
        SubmanifoldSpec::TripleProduct { .. } => {
            let r_sq = radii.r_sq();
            let r = radii.r();
            let r1 = radii.r1();
            let r2 = radii.r2();
            let r3 = radii.r3();
            let a11 = (2.0 * sigma + eps * radii.r3_sq()) / circum_sq;
            let a12 = (2.0 * sigma - eps * r_sq) * r3 / (r * circum_sq);
            let a22 = (2.0 * sigma * radii.r3_sq() + eps * r_sq * r_sq) / (r_sq * circum_sq);
            let a13 = (radii.r2_sq() - radii.r1_sq()) * sigma / (r1 * r2 * r * circum);
            let a23 = (radii.r2_sq() - radii.r1_sq()) * r3 * sigma / (r1 * r2 * r_sq * circum);
            let a33 = -2.0 * sigma / r_sq;
            let a = SmallMatrix::from_rows(&[
                vec![a11, a12, a13],
                vec![a12, a22, a23],
                vec![a13, a23, a33],
            ]);
            // ξ₁ = (1/R)(y − (σ/r1²)x, x − (σ/r2²)y, 0), ξ₂ = (r3/(rR)) · same,
            // ξ₃ = (1/r)((σ/(r1 r2))x − (r1/r2)y, (r2/r1)x − (σ/(r1 r2))y, 0)
            let cx = sigma / radii.r1_sq();
            let cy = sigma / radii.r2_sq();
            let base = AmbientVector::new(
                pt.y().iter().zip(pt.x()).map(|(b, a_)| b - cx * a_).collect(),
                pt.x().iter().zip(pt.y()).map(|(b, a_)| b - cy * a_).collect(),
                vec![0.0; pt.q()],
            )?;
            let xi1 = base.scaled(1.0 / circum);
            let xi2 = base.scaled(r3 / (r * circum));
            let cs = sigma / (r1 * r2);
            let xi3 = AmbientVector::new(
                pt.x()
                    .iter()
                    .zip(pt.y())
                    .map(|(x_, y_)| (cs * x_ - (r1 / r2) * y_) / r)
                    .collect(),
                pt.x()
                    .iter()
                    .zip(pt.y())
                    .map(|(x_, y_)| ((r2 / r1) * x_ - cs * y_) / r)
                    .collect(),
                vec![0.0; pt.q()],
            )?;
            (a, vec![xi1, xi2, xi3])
        }
    };

    Ok(InducedStructure {
        spec: spec.clone(),
        signs: signs.clone(),
        pt: pt.clone(),
        radii,
        frame,
        a,
        xi,
        provenance: Provenance::ClosedForm,
    })
}

/// Closed-form structure at an on-manifold point.
pub fn closed_form_structure(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    signs: &SignPattern,
) -> Result<InducedStructure> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    closed_form_structure_extended(spec, pt, signs)
}

/// Componentwise deviation between the closed-form and oracle structures at
/// one point: max over the entries of `a` and the components of each `ξ_α`.
pub fn structure_deviation(cf: &InducedStructure, or: &InducedStructure) -> f64 {
    let mut dev = cf.a().sub(or.a()).inf_norm();
    for (a, b) in cf.xi().iter().zip(or.xi()) {
        dev = dev.max(a.sub(b).inf_norm());
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{sample_point, sample_tangent};
    use crate::rng::Stream;

    const SQRT2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn uniform(q: usize, eps: f64) -> SignPattern {
        SignPattern::uniform(q, eps).unwrap()
    }

    #[test]
    fn oracle_hypersphere_anchor() {
        // At (1, 0, 0): σ = 0 and r3 = 0, so a = [0] and ξ = P̃N₁ = (0, 1, 0).
        let spec = SubmanifoldSpec::hypersphere(1, 1, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 1, &[1.0, 0.0, 0.0]).unwrap();
        let st = oracle_structure(&spec, &pt, &uniform(1, 1.0)).unwrap();
        assert!(st.a().get(0, 0).abs() < 1e-15);
        let xi = st.xi()[0].to_flat();
        assert!((xi[0]).abs() < 1e-15 && (xi[1] - 1.0).abs() < 1e-15 && xi[2].abs() < 1e-15);
    }

    #[test]
    fn oracle_double_product_anchor() {
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let st = oracle_structure(&spec, &pt, &uniform(2, 1.0)).unwrap();
        let expected = [[0.5, -0.5], [-0.5, 0.5]];
        for (i, row) in expected.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!(
                    (st.a().get(i, j) - want).abs() < 1e-14,
                    "a = {:?}",
                    st.a().to_rows()
                );
            }
        }
    }

    #[test]
    fn oracle_xi_is_orthogonal_to_the_frame() {
        let mut stream = Stream::new(2);
        for spec in [
            SubmanifoldSpec::hypersphere(2, 2, 1.5).unwrap(),
            SubmanifoldSpec::double_product(2, 3, 1.0, 2.0).unwrap(),
            SubmanifoldSpec::triple_product(2, 2, 1.0, 2.0, 1.0).unwrap(),
        ] {
            let signs = uniform(spec.q(), -1.0);
            for _ in 0..20 {
                let pt = sample_point(&spec, &mut stream).unwrap();
                let st = oracle_structure(&spec, &pt, &signs).unwrap();
                for xi in st.xi() {
                    for n in st.frame() {
                        assert!(xi.dot(n).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn xi_fields_are_tangent() {
        let mut stream = Stream::new(22);
        for spec in [
            SubmanifoldSpec::hypersphere(1, 2, 1.0).unwrap(),
            SubmanifoldSpec::double_product(1, 2, 1.0, 2.0).unwrap(),
            SubmanifoldSpec::triple_product(2, 2, 1.0, 2.0, 0.5).unwrap(),
        ] {
            let signs = uniform(spec.q(), 1.0);
            for _ in 0..20 {
                let pt = sample_point(&spec, &mut stream).unwrap();
                for st in [
                    oracle_structure(&spec, &pt, &signs).unwrap(),
                    closed_form_structure(&spec, &pt, &signs).unwrap(),
                ] {
                    for xi in st.xi() {
                        assert!(spec.is_tangent(&pt, xi, 1e-10).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn structures_reject_off_manifold_points() {
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 2, &[1.5, 0.0, 1.0, 0.0]).unwrap();
        let signs = uniform(2, 1.0);
        assert!(matches!(
            oracle_structure(&spec, &pt, &signs),
            Err(Error::OffManifold { .. })
        ));
        assert!(matches!(
            closed_form_structure(&spec, &pt, &signs),
            Err(Error::OffManifold { .. })
        ));
    }

    #[test]
    fn closed_form_triple_product_sigma_zero_anchors() {
        // x ⟂ y makes σ = 0, so the third row/column of a vanishes and
        // a₁₁ = ε r3²/R² = 1/3 here.
        let spec = SubmanifoldSpec::triple_product(2, 2, 1.0, 1.0, 1.0).unwrap();
        let pt = AmbientVector::from_flat(2, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        let st = closed_form_structure(&spec, &pt, &uniform(2, 1.0)).unwrap();
        assert!((st.a().get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        for k in 0..3 {
            assert!(st.a().get(2, k).abs() < 1e-15);
            assert!(st.a().get(k, 2).abs() < 1e-15);
        }
        // ξ₃ = (1/√2)(−y, x, 0) at this point.
        let xi3 = st.xi()[2].to_flat();
        let expected = [0.0, -SQRT2_INV, SQRT2_INV, 0.0, 0.0, 0.0];
        for (got, want) in xi3.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-15, "xi3 = {xi3:?}");
        }
    }

    #[test]
    fn closed_form_matches_oracle_everywhere() {
        let mut stream = Stream::new(6);
        for spec in [
            SubmanifoldSpec::hypersphere(1, 2, 1.0).unwrap(),
            SubmanifoldSpec::hypersphere(3, 3, 2.0).unwrap(),
            SubmanifoldSpec::double_product(1, 2, 1.0, 2.0).unwrap(),
            SubmanifoldSpec::double_product(2, 3, 0.5, 1.5).unwrap(),
            SubmanifoldSpec::triple_product(2, 2, 1.0, 2.0, 1.0).unwrap(),
            SubmanifoldSpec::triple_product(3, 2, 0.7, 1.1, 2.0).unwrap(),
        ] {
            for eps in [1.0, -1.0] {
                let signs = uniform(spec.q(), eps);
                for _ in 0..40 {
                    let pt = sample_point(&spec, &mut stream).unwrap();
                    let cf = closed_form_structure(&spec, &pt, &signs).unwrap();
                    let or = oracle_structure(&spec, &pt, &signs).unwrap();
                    assert!(
                        structure_deviation(&cf, &or) < 1e-12,
                        "a/xi deviate on {spec:?} eps={eps}"
                    );
                    for _ in 0..5 {
                        let x = sample_tangent(&spec, &pt, &mut stream).unwrap();
                        let du: f64 = cf
                            .u_form(&x)
                            .unwrap()
                            .iter()
                            .zip(or.u_form(&x).unwrap())
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0, f64::max);
                        assert!(du < 1e-12, "u deviates on {spec:?}");
                        let dp = cf
                            .p_apply(&x)
                            .unwrap()
                            .sub(&or.p_apply(&x).unwrap())
                            .inf_norm();
                        assert!(dp < 1e-12, "P deviates on {spec:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_u_examples() {
        // û₁ = û₂ = 1/2 for the documented double-product point and vector.
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let x = AmbientVector::from_flat(1, 2, &[0.0, SQRT2_INV, 0.0, SQRT2_INV]).unwrap();
        let st = closed_form_structure(&spec, &pt, &uniform(2, 1.0)).unwrap();
        let u = st.u_form(&x).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
        assert!((u[1] - 0.5).abs() < 1e-15);

        // A vector orthogonal to every ξ gets the zero covector.
        let z_only = AmbientVector::from_flat(1, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let u = st.u_form(&z_only).unwrap();
        assert!(u.iter().all(|v| v.abs() < 1e-15), "u = {u:?}");
    }

    #[test]
    fn u_of_xi_matches_identity_minus_a_squared() {
        let spec = SubmanifoldSpec::triple_product(2, 3, 1.0, 1.5, 0.8).unwrap();
        let signs = uniform(3, 1.0);
        let mut stream = Stream::new(10);
        for _ in 0..20 {
            let pt = sample_point(&spec, &mut stream).unwrap();
            let st = closed_form_structure(&spec, &pt, &signs).unwrap();
            let a_sq = st.a().mul(st.a());
            for beta in 0..3 {
                let u = st.u_form(&st.xi()[beta]).unwrap();
                for (alpha, &u_val) in u.iter().enumerate() {
                    let kronecker = if alpha == beta { 1.0 } else { 0.0 };
                    let want = kronecker - a_sq.get(alpha, beta);
                    assert!((u_val - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn p_apply_hypersphere_example() {
        let spec = SubmanifoldSpec::hypersphere(1, 1, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 1, &[1.0, 0.0, 0.0]).unwrap();
        let x = AmbientVector::from_flat(1, 1, &[0.0, 0.0, 1.0]).unwrap();
        let st = closed_form_structure(&spec, &pt, &uniform(1, 1.0)).unwrap();
        let px = st.p_apply(&x).unwrap().to_flat();
        assert!(px[0].abs() < 1e-15 && px[1].abs() < 1e-15 && (px[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p_of_xi_is_minus_a_xi() {
        let spec = SubmanifoldSpec::double_product(2, 2, 1.0, 1.0).unwrap();
        let signs = uniform(2, 1.0);
        let mut stream = Stream::new(14);
        for _ in 0..20 {
            let pt = sample_point(&spec, &mut stream).unwrap();
            for st in [
                closed_form_structure(&spec, &pt, &signs).unwrap(),
                oracle_structure(&spec, &pt, &signs).unwrap(),
            ] {
                for alpha in 0..2 {
                    let lhs = st.p_apply(&st.xi()[alpha]).unwrap();
                    let mut rhs = AmbientVector::zeros(spec.p(), spec.q());
                    for beta in 0..2 {
                        rhs = rhs.add_scaled(-st.a().get(alpha, beta), &st.xi()[beta]);
                    }
                    assert!(lhs.sub(&rhs).inf_norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn p_squared_reconstructs_tangent_vectors() {
        let spec = SubmanifoldSpec::triple_product(2, 2, 1.0, 1.0, 1.0).unwrap();
        let signs = uniform(2, 1.0);
        let mut stream = Stream::new(15);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let st = oracle_structure(&spec, &pt, &signs).unwrap();
        for _ in 0..10 {
            let x = sample_tangent(&spec, &pt, &mut stream).unwrap();
            let ppx = st.p_apply(&st.p_apply(&x).unwrap()).unwrap();
            let u = st.u_form(&x).unwrap();
            let mut want = x.clone();
            for (alpha, &u_val) in u.iter().enumerate() {
                want = want.add_scaled(-u_val, &st.xi()[alpha]);
            }
            assert!(ppx.sub(&want).inf_norm() < 1e-12);
        }
    }

    #[test]
    fn p_apply_output_stays_tangent() {
        let spec = SubmanifoldSpec::double_product(2, 3, 1.0, 2.0).unwrap();
        let signs = uniform(3, -1.0);
        let mut stream = Stream::new(16);
        let pt = sample_point(&spec, &mut stream).unwrap();
        for st in [
            closed_form_structure(&spec, &pt, &signs).unwrap(),
            oracle_structure(&spec, &pt, &signs).unwrap(),
        ] {
            for _ in 0..10 {
                let x = sample_tangent(&spec, &pt, &mut stream).unwrap();
                let px = st.p_apply(&x).unwrap();
                assert!(spec.is_tangent(&pt, &px, 1e-10).unwrap());
            }
        }
    }

    #[test]
    fn a_matrix_is_symmetric() {
        let spec = SubmanifoldSpec::triple_product(2, 2, 0.9, 1.3, 0.5).unwrap();
        let mut stream = Stream::new(19);
        let signs = uniform(2, 1.0);
        for _ in 0..30 {
            let pt = sample_point(&spec, &mut stream).unwrap();
            let or = oracle_structure(&spec, &pt, &signs).unwrap();
            assert!(or.a().symmetry_defect() < 1e-12);
            let cf = closed_form_structure(&spec, &pt, &signs).unwrap();
            assert!(cf.a().symmetry_defect() < 1e-12);
        }
    }

    #[test]
    fn closed_form_rejects_mixed_signs_oracle_accepts() {
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        let mixed = SignPattern::new(vec![1.0, -1.0]).unwrap();
        assert!(matches!(
            closed_form_structure(&spec, &pt, &mixed),
            Err(Error::Unsupported(_))
        ));
        assert!(oracle_structure(&spec, &pt, &mixed).is_ok());
    }

    #[test]
    fn non_tangent_inputs_are_rejected() {
        let spec = SubmanifoldSpec::hypersphere(1, 1, 1.0).unwrap();
        let pt = AmbientVector::from_flat(1, 1, &[1.0, 0.0, 0.0]).unwrap();
        let st = oracle_structure(&spec, &pt, &uniform(1, 1.0)).unwrap();
        assert!(matches!(st.u_form(&pt), Err(Error::NotTangent { .. })));
        assert!(matches!(st.p_apply(&pt), Err(Error::NotTangent { .. })));
    }

    #[test]
    fn hypersphere_u_restricts_to_double_product_u1() {
        // On double-product points with double-product tangents the z-pairing
        // vanishes, so the codimension-1 ū and the product's û₁ both reduce
        // to τ/R.
        let dp = SubmanifoldSpec::double_product(2, 2, 1.0, 2.0).unwrap();
        let hs = SubmanifoldSpec::hypersphere(2, 2, dp.circumradius()).unwrap();
        let signs = uniform(2, 1.0);
        let mut stream = Stream::new(23);
        for _ in 0..20 {
            let pt = sample_point(&dp, &mut stream).unwrap();
            let x = sample_tangent(&dp, &pt, &mut stream).unwrap();
            let u_sphere = closed_form_structure(&hs, &pt, &signs)
                .unwrap()
                .u_form(&x)
                .unwrap()[0];
            let u1_product = closed_form_structure(&dp, &pt, &signs)
                .unwrap()
                .u_form(&x)
                .unwrap()[0];
            assert!((u_sphere - u1_product).abs() < 1e-12);
        }
    }
}
