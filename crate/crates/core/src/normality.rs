//! Finite-difference differential checks: Lie brackets, the Nijenhuis
//! torsion of the induced operator, exterior derivatives of the 1-forms,
//! the normality combination `N_P − 2 Σ du_α ξ_α`, shape (Weingarten)
//! operators, and the normal-connection coefficients.
//!
//! All fields are evaluated through their smooth off-manifold extensions
//! (frames and structures written in the radii of the evaluation point), so
//! differentiation happens along straight ambient lines; no geodesic
//! machinery is involved. At on-manifold points the results for tangent
//! fields are extension-independent.

use crate::ambient::{AmbientVector, SignPattern};
use crate::induced::{closed_form_structure_extended, oracle_structure_extended, InducedStructure};
use crate::manifolds::{sample_point, tangent_project_extended, normal_frame_extended, SubmanifoldSpec};
use crate::matrix::SmallMatrix;
use crate::rng::Stream;
use crate::tol;
use crate::{Error, Result};

/// Central-difference configuration.
///
/// `du_half` switches the exterior-derivative convention from
/// `du(X,Y) = X(u(Y)) − Y(u(X)) − u([X,Y])` (default) to half of it; the two
/// conventions differ by the factor that interacts with the "2" in the
/// normality combination, and the totally umbilical hypersphere is the test
/// that discriminates them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    h: f64,
    pub richardson: bool,
    pub du_half: bool,
}

impl FdConfig {
    pub const MIN_STEP: f64 = 1e-8;
    pub const MAX_STEP: f64 = 1e-2;

    /// Validates the step size; below [`Self::MIN_STEP`] cancellation
    /// dominates and the scheme loses its order.
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() || !(Self::MIN_STEP..=Self::MAX_STEP).contains(&h) {
            return Err(Error::FdConfig(format!(
                "step h = {h:e} outside [{:e}, {:e}]",
                Self::MIN_STEP,
                Self::MAX_STEP
            )));
        }
        Ok(FdConfig {
            h,
            richardson: false,
            du_half: false,
        })
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn with_du_half(mut self, on: bool) -> Self {
        self.du_half = on;
        self
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            h: 1e-5,
            richardson: false,
            du_half: false,
        }
    }
}

/// A tangent vector field generated by projecting one constant ambient
/// vector: `X_c(y) = y ↦ tangential part of c at y`. A family of these,
/// with generic generators, spans enough directions to probe tensor
/// identities that hold for all fields.
#[derive(Clone, Debug)]
pub struct TangentFieldSpec {
    generator: AmbientVector,
}

impl TangentFieldSpec {
    pub fn new(generator: AmbientVector) -> Self {
        TangentFieldSpec { generator }
    }

    pub fn generator(&self) -> &AmbientVector {
        &self.generator
    }

    /// Field value at `y` (on or slightly off the manifold).
    pub fn eval(&self, spec: &SubmanifoldSpec, y: &AmbientVector) -> Result<AmbientVector> {
        tangent_project_extended(spec, y, &self.generator)
    }
}

/// Structure evaluator for the differential checks: closed form for a
/// uniform pattern (the artifact under test), the generic decomposition
/// otherwise.
fn structure_at(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    y: &AmbientVector,
) -> Result<InducedStructure> {
    if signs.uniform_value().is_some() {
        closed_form_structure_extended(spec, y, signs)
    } else {
        oracle_structure_extended(spec, y, signs)
    }
}

fn dirderiv_vec<F>(
    field: &F,
    pt: &AmbientVector,
    dir: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector>
where
    F: Fn(&AmbientVector) -> Result<AmbientVector> + ?Sized,
{
    let central = |h: f64| -> Result<AmbientVector> {
        let plus = field(&pt.add_scaled(h, dir))?;
        let minus = field(&pt.add_scaled(-h, dir))?;
        Ok(plus.sub(&minus).scaled(0.5 / h))
    };
    if cfg.richardson {
        let full = central(cfg.h)?;
        let half = central(cfg.h / 2.0)?;
        // (4 D(h/2) − D(h)) / 3
        Ok(half.scaled(4.0 / 3.0).add_scaled(-1.0 / 3.0, &full))
    } else {
        central(cfg.h)
    }
}

fn dirderiv_scalar<F>(
    field: &F,
    pt: &AmbientVector,
    dir: &AmbientVector,
    cfg: &FdConfig,
) -> Result<f64>
where
    F: Fn(&AmbientVector) -> Result<f64> + ?Sized,
{
    let central = |h: f64| -> Result<f64> {
        let plus = field(&pt.add_scaled(h, dir))?;
        let minus = field(&pt.add_scaled(-h, dir))?;
        Ok((plus - minus) * (0.5 / h))
    };
    if cfg.richardson {
        let full = central(cfg.h)?;
        let half = central(cfg.h / 2.0)?;
        Ok((4.0 * half - full) / 3.0)
    } else {
        central(cfg.h)
    }
}

/// Lie bracket of two arbitrary vector fields given as evaluators:
/// `[F, G](pt) = D_{F(pt)} G − D_{G(pt)} F` by central differences.
pub fn lie_bracket_of<F, G>(
    f: &F,
    g: &G,
    pt: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector>
where
    F: Fn(&AmbientVector) -> Result<AmbientVector> + ?Sized,
    G: Fn(&AmbientVector) -> Result<AmbientVector> + ?Sized,
{
    let f0 = f(pt)?;
    let g0 = g(pt)?;
    let dg_along_f = dirderiv_vec(g, pt, &f0, cfg)?;
    let df_along_g = dirderiv_vec(f, pt, &g0, cfg)?;
    Ok(dg_along_f.sub(&df_along_g))
}

/// Lie bracket of two projected-generator tangent fields at `pt`.
pub fn lie_bracket(
    spec: &SubmanifoldSpec,
    f: &TangentFieldSpec,
    g: &TangentFieldSpec,
    pt: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    lie_bracket_of(
        &|y: &AmbientVector| f.eval(spec, y),
        &|y: &AmbientVector| g.eval(spec, y),
        pt,
        cfg,
    )
}

/// Nijenhuis torsion of the induced operator applied to two tangent fields:
/// `N_P(F, G) = [PF, PG] + P²[F, G] − P[PF, G] − P[F, PG]`,
/// every bracket by central differences, every P through the structure at
/// the relevant point.
pub fn nijenhuis(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    f: &TangentFieldSpec,
    g: &TangentFieldSpec,
    pt: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    let f_eval = |y: &AmbientVector| f.eval(spec, y);
    let g_eval = |y: &AmbientVector| g.eval(spec, y);
    let pf_eval = |y: &AmbientVector| -> Result<AmbientVector> {
        Ok(structure_at(spec, signs, y)?.p_unchecked(&f.eval(spec, y)?))
    };
    let pg_eval = |y: &AmbientVector| -> Result<AmbientVector> {
        Ok(structure_at(spec, signs, y)?.p_unchecked(&g.eval(spec, y)?))
    };

    let st = structure_at(spec, signs, pt)?;
    let term1 = lie_bracket_of(&pf_eval, &pg_eval, pt, cfg)?;
    let term2 = st.p_unchecked(&st.p_unchecked(&lie_bracket_of(&f_eval, &g_eval, pt, cfg)?));
    let term3 = st.p_unchecked(&lie_bracket_of(&pf_eval, &g_eval, pt, cfg)?);
    let term4 = st.p_unchecked(&lie_bracket_of(&f_eval, &pg_eval, pt, cfg)?);
    Ok(term1.add(&term2).sub(&term3).sub(&term4))
}

/// Exterior derivative of the 1-form u_α on two tangent fields:
/// `du_α(F, G) = F(u_α(G)) − G(u_α(F)) − u_α([F, G])`, halved when the
/// configuration selects the other convention.
pub fn du(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    alpha: usize,
    f: &TangentFieldSpec,
    g: &TangentFieldSpec,
    pt: &AmbientVector,
    cfg: &FdConfig,
) -> Result<f64> {
    let u_of_g = |y: &AmbientVector| -> Result<f64> {
        Ok(structure_at(spec, signs, y)?.u_unchecked(&g.eval(spec, y)?)[alpha])
    };
    let u_of_f = |y: &AmbientVector| -> Result<f64> {
        Ok(structure_at(spec, signs, y)?.u_unchecked(&f.eval(spec, y)?)[alpha])
    };
    let f0 = f.eval(spec, pt)?;
    let g0 = g.eval(spec, pt)?;
    let term_f = dirderiv_scalar(&u_of_g, pt, &f0, cfg)?;
    let term_g = dirderiv_scalar(&u_of_f, pt, &g0, cfg)?;
    let bracket = lie_bracket(spec, f, g, pt, cfg)?;
    let st = structure_at(spec, signs, pt)?;
    let u_bracket = st.u_unchecked(&bracket)[alpha];
    let value = term_f - term_g - u_bracket;
    Ok(if cfg.du_half { 0.5 * value } else { value })
}

/// Result of a normality probe at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityCheck {
    /// max over the probed field pairs of ‖N_P(F,G) − 2 Σ_α du_α(F,G) ξ_α‖∞.
    pub max_residual: f64,
    /// det(I − a²) at the point (nondegeneracy hypothesis).
    pub det_i_minus_a_sq: f64,
}

/// Probe the normality combination at `pt` with `n_pairs` random generator
/// pairs drawn from `seed`.
pub fn check_normality(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    pt: &AmbientVector,
    cfg: &FdConfig,
    n_pairs: usize,
    seed: u64,
) -> Result<NormalityCheck> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    let st = structure_at(spec, signs, pt)?;
    let root = Stream::new(seed);
    let mut max_residual = 0.0_f64;
    for pair_index in 0..n_pairs {
        let mut stream = root.substream(pair_index as u64);
        let f = TangentFieldSpec::new(random_unit_generator(spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(spec, &mut stream));
        let n_p = nijenhuis(spec, signs, &f, &g, pt, cfg)?;
        let mut combo = n_p;
        for alpha in 0..st.codimension() {
            let du_val = du(spec, signs, alpha, &f, &g, pt, cfg)?;
            combo = combo.add_scaled(-2.0 * du_val, &st.xi()[alpha]);
        }
        max_residual = max_residual.max(combo.inf_norm());
    }
    Ok(NormalityCheck {
        max_residual,
        det_i_minus_a_sq: st.det_i_minus_a_sq(),
    })
}

/// Shape operator along the α-th normal: `A_α X = −tangential(D_X N_α)`,
/// outward-normal sign convention.
pub fn weingarten(
    spec: &SubmanifoldSpec,
    alpha: usize,
    pt: &AmbientVector,
    x: &AmbientVector,
    cfg: &FdConfig,
) -> Result<AmbientVector> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    spec.ensure_tangent(pt, x, tol::TANGENCY_GUARD)?;
    let n_field = |y: &AmbientVector| -> Result<AmbientVector> {
        Ok(normal_frame_extended(spec, y)?
            .into_iter()
            .nth(alpha)
            .expect("alpha < codimension"))
    };
    let derivative = dirderiv_vec(&n_field, pt, x, cfg)?;
    Ok(tangent_project_extended(spec, pt, &derivative)?.scaled(-1.0))
}

/// The matrix of normal-connection coefficients `⟨D_X N_α, N_β⟩` for α ≠ β
/// (diagonal forced to zero by unit norm). Antisymmetric up to
/// finite-difference error; identically zero on all three families.
pub fn normal_connection_residual(
    spec: &SubmanifoldSpec,
    pt: &AmbientVector,
    x: &AmbientVector,
    cfg: &FdConfig,
) -> Result<SmallMatrix> {
    spec.ensure_on_manifold(pt, tol::ON_MANIFOLD)?;
    spec.ensure_tangent(pt, x, tol::TANGENCY_GUARD)?;
    let c = spec.codimension();
    let frame = normal_frame_extended(spec, pt)?;
    let mut out = SmallMatrix::zeros(c);
    for alpha in 0..c {
        let n_field = |y: &AmbientVector| -> Result<AmbientVector> {
            Ok(normal_frame_extended(spec, y)?
                .into_iter()
                .nth(alpha)
                .expect("alpha < codimension"))
        };
        let derivative = dirderiv_vec(&n_field, pt, x, cfg)?;
        for (beta, n_beta) in frame.iter().enumerate() {
            if alpha != beta {
                out.set(alpha, beta, derivative.dot(n_beta));
            }
        }
    }
    Ok(out)
}

/// A unit Gaussian ambient vector, the generator pool for field probes.
pub fn random_unit_generator(spec: &SubmanifoldSpec, stream: &mut Stream) -> AmbientVector {
    loop {
        let raw = AmbientVector::new(
            stream.gaussians(spec.p()),
            stream.gaussians(spec.p()),
            stream.gaussians(spec.q()),
        )
        .expect("blocks constructed with equal p");
        let norm = raw.norm();
        if norm > 1e-8 {
            return raw.scaled(1.0 / norm);
        }
    }
}

/// Which differential quantity a convergence probe evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdProbe {
    Bracket,
    Nijenhuis,
    Du,
}

/// Step-halving evidence for the order-2 scheme: deviations of the h and h/2
/// evaluations from the Richardson reference built at (h/2, h/4).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceSummary {
    pub median_coarse: f64,
    pub median_fine: f64,
    /// `median_coarse / median_fine`; ≈ 4 for a second-order scheme.
    pub ratio: f64,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Run `n_probes` random convergence probes of one differential quantity at
/// base step `h`.
pub fn fd_convergence(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    probe: FdProbe,
    n_probes: usize,
    seed: u64,
    h: f64,
) -> Result<ConvergenceSummary> {
    let root = Stream::new(seed);
    let mut coarse = Vec::with_capacity(n_probes);
    let mut fine = Vec::with_capacity(n_probes);
    for probe_index in 0..n_probes {
        let mut stream = root.substream(probe_index as u64);
        let pt = sample_point(spec, &mut stream)?;
        let f = TangentFieldSpec::new(random_unit_generator(spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(spec, &mut stream));
        let alpha = (stream.next_u64() % spec.codimension() as u64) as usize;

        let eval_vec = |step: f64| -> Result<AmbientVector> {
            let cfg = FdConfig::new(step)?;
            match probe {
                FdProbe::Bracket => lie_bracket(spec, &f, &g, &pt, &cfg),
                FdProbe::Nijenhuis => nijenhuis(spec, signs, &f, &g, &pt, &cfg),
                FdProbe::Du => unreachable!("scalar probe"),
            }
        };
        let eval_scalar = |step: f64| -> Result<f64> {
            let cfg = FdConfig::new(step)?;
            du(spec, signs, alpha, &f, &g, &pt, &cfg)
        };

        match probe {
            FdProbe::Du => {
                let v_h = eval_scalar(h)?;
                let v_h2 = eval_scalar(h / 2.0)?;
                let v_h4 = eval_scalar(h / 4.0)?;
                let reference = (4.0 * v_h4 - v_h2) / 3.0;
                coarse.push((v_h - reference).abs());
                fine.push((v_h2 - reference).abs());
            }
            _ => {
                let v_h = eval_vec(h)?;
                let v_h2 = eval_vec(h / 2.0)?;
                let v_h4 = eval_vec(h / 4.0)?;
                let reference = v_h4.scaled(4.0 / 3.0).add_scaled(-1.0 / 3.0, &v_h2);
                coarse.push(v_h.sub(&reference).inf_norm());
                fine.push(v_h2.sub(&reference).inf_norm());
            }
        }
    }
    let median_coarse = median(coarse);
    let median_fine = median(fine);
    Ok(ConvergenceSummary {
        median_coarse,
        median_fine,
        ratio: median_coarse / median_fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_s2() -> SubmanifoldSpec {
        SubmanifoldSpec::hypersphere(1, 1, 1.0).unwrap()
    }

    fn plus(q: usize) -> SignPattern {
        SignPattern::uniform(q, 1.0).unwrap()
    }

    #[test]
    fn fd_config_validates_step() {
        assert!(FdConfig::new(1e-5).is_ok());
        assert!(matches!(FdConfig::new(1e-9), Err(Error::FdConfig(_))));
        assert!(matches!(FdConfig::new(0.1), Err(Error::FdConfig(_))));
        assert!(matches!(FdConfig::new(f64::NAN), Err(Error::FdConfig(_))));
    }

    #[test]
    fn tangent_field_values_are_tangent() {
        let spec = SubmanifoldSpec::double_product(2, 2, 1.0, 1.0).unwrap();
        let mut stream = Stream::new(3);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let field = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let value = field.eval(&spec, &pt).unwrap();
        assert!(spec.is_tangent(&pt, &value, 1e-10).unwrap());
    }

    #[test]
    fn bracket_of_a_field_with_itself_vanishes() {
        let spec = sphere_s2();
        let cfg = FdConfig::default();
        let mut stream = Stream::new(5);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let bracket = lie_bracket(&spec, &f, &f, &pt, &cfg).unwrap();
        assert!(bracket.inf_norm() < 1e-9, "{}", bracket.inf_norm());
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let spec = SubmanifoldSpec::triple_product(2, 2, 1.0, 1.0, 1.0).unwrap();
        let cfg = FdConfig::default();
        let mut stream = Stream::new(6);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let fg = lie_bracket(&spec, &f, &g, &pt, &cfg).unwrap();
        let gf = lie_bracket(&spec, &g, &f, &pt, &cfg).unwrap();
        assert!(fg.add(&gf).inf_norm() < 1e-9);
    }

    #[test]
    fn rotation_field_brackets_close_like_so3() {
        // On S² ⊂ E³ the linear fields F_i(y) = e_i × y are tangent, and with
        // the bracket convention [F,G] = D_F G − D_G F the bracket of two
        // rotation generators is minus the field of the third axis.
        let spec = sphere_s2();
        let cfg = FdConfig::default();
        let cross = |axis: usize| {
            move |y: &AmbientVector| -> Result<AmbientVector> {
                let v = y.to_flat();
                let e = match axis {
                    0 => [0.0, -v[2], v[1]],
                    1 => [v[2], 0.0, -v[0]],
                    _ => [-v[1], v[0], 0.0],
                };
                AmbientVector::from_flat(1, 1, &e)
            }
        };
        let mut stream = Stream::new(8);
        let pt = sample_point(&spec, &mut stream).unwrap();
        for (i, j, k) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let bracket = lie_bracket_of(&cross(i), &cross(j), &pt, &cfg).unwrap();
            let expected = cross(k)(&pt).unwrap().scaled(-1.0);
            assert!(
                bracket.sub(&expected).inf_norm() < 5e-8,
                "[F{i}, F{j}] != -F{k}: {:?} vs {:?}",
                bracket.to_flat(),
                expected.to_flat()
            );
        }
    }

    #[test]
    fn bracket_of_tangent_fields_is_tangent() {
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 2.0).unwrap();
        let cfg = FdConfig::default();
        let mut stream = Stream::new(9);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let bracket = lie_bracket(&spec, &f, &g, &pt, &cfg).unwrap();
        assert!(spec.tangency_residual(&pt, &bracket).unwrap() < 1e-9);
    }

    #[test]
    fn nijenhuis_is_antisymmetric_and_vanishes_on_diagonal() {
        let spec = sphere_s2();
        let signs = plus(1);
        let cfg = FdConfig::default();
        let mut stream = Stream::new(10);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let diag = nijenhuis(&spec, &signs, &f, &f, &pt, &cfg).unwrap();
        assert!(diag.inf_norm() < 1e-8);
        let fg = nijenhuis(&spec, &signs, &f, &g, &pt, &cfg).unwrap();
        let gf = nijenhuis(&spec, &signs, &g, &f, &pt, &cfg).unwrap();
        assert!(fg.add(&gf).inf_norm() < 1e-8);
    }

    #[test]
    fn du_is_antisymmetric_and_vanishes_on_diagonal() {
        let spec = SubmanifoldSpec::double_product(2, 2, 1.0, 1.0).unwrap();
        let signs = plus(2);
        let cfg = FdConfig::default();
        let mut stream = Stream::new(11);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        for alpha in 0..2 {
            let diag = du(&spec, &signs, alpha, &f, &f, &pt, &cfg).unwrap();
            assert!(diag.abs() < 1e-9);
            let fg = du(&spec, &signs, alpha, &f, &g, &pt, &cfg).unwrap();
            let gf = du(&spec, &signs, alpha, &g, &f, &pt, &cfg).unwrap();
            assert!((fg + gf).abs() < 1e-9);
        }
    }

    #[test]
    fn du_step_halving_is_second_order_consistent() {
        let spec = sphere_s2();
        let signs = plus(1);
        let mut stream = Stream::new(12);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let v_h = du(&spec, &signs, 0, &f, &g, &pt, &FdConfig::new(1e-3).unwrap()).unwrap();
        let v_h2 = du(&spec, &signs, 0, &f, &g, &pt, &FdConfig::new(5e-4).unwrap()).unwrap();
        // Both are the true value + O(h²); their difference is O(h²).
        assert!((v_h - v_h2).abs() < 1e-5);
    }

    #[test]
    fn du_half_flag_rescales_the_value() {
        let spec = sphere_s2();
        let signs = plus(1);
        let mut stream = Stream::new(13);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let full = du(&spec, &signs, 0, &f, &g, &pt, &FdConfig::default()).unwrap();
        let half = du(
            &spec,
            &signs,
            0,
            &f,
            &g,
            &pt,
            &FdConfig::default().with_du_half(true),
        )
        .unwrap();
        assert!((full - 2.0 * half).abs() < 1e-12);
    }

    #[test]
    fn hypersphere_is_normal() {
        let spec = SubmanifoldSpec::hypersphere(2, 2, 1.0).unwrap();
        let signs = plus(2);
        let cfg = FdConfig::default();
        let mut stream = Stream::new(14);
        for _ in 0..5 {
            let pt = sample_point(&spec, &mut stream).unwrap();
            let check = check_normality(&spec, &signs, &pt, &cfg, 4, 77).unwrap();
            if check.det_i_minus_a_sq.abs() > tol::DET_NONDEGENERATE {
                assert!(
                    check.max_residual < tol::FD_NORMALITY,
                    "normality residual {} at det {}",
                    check.max_residual,
                    check.det_i_minus_a_sq
                );
            }
        }
    }

    #[test]
    fn det_is_one_at_sigma_zero_equator_point() {
        // σ = 0 and r3 = 0 force a₁₁ = 0, hence det(I − a²) = 1.
        let spec = sphere_s2();
        let signs = plus(1);
        let pt = AmbientVector::from_flat(1, 1, &[1.0, 0.0, 0.0]).unwrap();
        let check =
            check_normality(&spec, &signs, &pt, &FdConfig::default(), 2, 5).unwrap();
        assert!((check.det_i_minus_a_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weingarten_of_the_sphere_is_minus_identity_over_radius() {
        let radius = 2.0;
        let spec = SubmanifoldSpec::hypersphere(2, 2, radius).unwrap();
        let cfg = FdConfig::default();
        let mut stream = Stream::new(15);
        for _ in 0..10 {
            let pt = sample_point(&spec, &mut stream).unwrap();
            let x = crate::manifolds::sample_tangent(&spec, &pt, &mut stream).unwrap();
            let ax = weingarten(&spec, 0, &pt, &x, &cfg).unwrap();
            let expected = x.scaled(-1.0 / radius);
            assert!(ax.sub(&expected).inf_norm() < tol::FD_SHAPE_OPERATOR);
        }
    }

    #[test]
    fn weingarten_is_self_adjoint() {
        let spec = SubmanifoldSpec::triple_product(2, 2, 1.0, 2.0, 1.0).unwrap();
        let cfg = FdConfig::default();
        let mut stream = Stream::new(16);
        let pt = sample_point(&spec, &mut stream).unwrap();
        for alpha in 0..3 {
            for _ in 0..5 {
                let x = crate::manifolds::sample_tangent(&spec, &pt, &mut stream).unwrap();
                let y = crate::manifolds::sample_tangent(&spec, &pt, &mut stream).unwrap();
                let ax = weingarten(&spec, alpha, &pt, &x, &cfg).unwrap();
                let ay = weingarten(&spec, alpha, &pt, &y, &cfg).unwrap();
                assert!((ax.dot(&y) - x.dot(&ay)).abs() < tol::FD_SELF_ADJOINT);
            }
        }
    }

    #[test]
    fn normal_connection_vanishes_and_is_antisymmetric() {
        let cfg = FdConfig::default();
        let mut stream = Stream::new(17);

        // Codimension 1: the matrix is trivially zero.
        let hs = sphere_s2();
        let pt = sample_point(&hs, &mut stream).unwrap();
        let x = crate::manifolds::sample_tangent(&hs, &pt, &mut stream).unwrap();
        let m = normal_connection_residual(&hs, &pt, &x, &cfg).unwrap();
        assert_eq!(m.inf_norm(), 0.0);

        for spec in [
            SubmanifoldSpec::double_product(1, 2, 1.0, 2.0).unwrap(),
            SubmanifoldSpec::triple_product(2, 2, 1.0, 1.0, 1.0).unwrap(),
        ] {
            let pt = sample_point(&spec, &mut stream).unwrap();
            let x = crate::manifolds::sample_tangent(&spec, &pt, &mut stream).unwrap();
            let m = normal_connection_residual(&spec, &pt, &x, &cfg).unwrap();
            assert!(m.inf_norm() < tol::FD_CONNECTION, "{:?}", m.to_rows());
            assert!(m.add_transpose_norm() < 1e-9);
        }
    }

    #[test]
    fn convergence_ratio_is_near_four() {
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let signs = plus(2);
        for probe in [FdProbe::Bracket, FdProbe::Nijenhuis, FdProbe::Du] {
            let summary = fd_convergence(&spec, &signs, probe, 20, 42, 1e-3).unwrap();
            assert!(
                summary.ratio > 2.5 && summary.ratio < 6.0,
                "{probe:?}: {summary:?}"
            );
        }
    }

    #[test]
    fn richardson_extrapolation_tightens_the_bracket() {
        // Against a reference computed at a much finer step, the
        // Richardson-extrapolated bracket at a coarse step must beat the
        // plain central difference.
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let mut stream = Stream::new(33);
        let pt = sample_point(&spec, &mut stream).unwrap();
        let f = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let g = TangentFieldSpec::new(random_unit_generator(&spec, &mut stream));
        let reference =
            lie_bracket(&spec, &f, &g, &pt, &FdConfig::new(1e-6).unwrap()).unwrap();
        let coarse = FdConfig::new(1e-3).unwrap();
        let plain = lie_bracket(&spec, &f, &g, &pt, &coarse).unwrap();
        let extrapolated =
            lie_bracket(&spec, &f, &g, &pt, &coarse.with_richardson(true)).unwrap();
        let err_plain = plain.sub(&reference).inf_norm();
        let err_rich = extrapolated.sub(&reference).inf_norm();
        assert!(
            err_rich < err_plain / 10.0,
            "richardson {err_rich:.3e} vs plain {err_plain:.3e}"
        );
    }

    #[test]
    fn residual_statistic_survives_generator_rotation() {
        // Rotating every generator by one fixed orthogonal map must leave
        // the max normality-residual statistic within a factor of two
        // (bracket naturality; the fields transform covariantly).
        let spec = SubmanifoldSpec::double_product(1, 2, 1.0, 1.0).unwrap();
        let signs = plus(2);
        let cfg = FdConfig::default();
        let mut stream = Stream::new(55);
        let pt = sample_point(&spec, &mut stream).unwrap();

        let generators: Vec<(AmbientVector, AmbientVector)> = (0..10)
            .map(|_| {
                (
                    random_unit_generator(&spec, &mut stream),
                    random_unit_generator(&spec, &mut stream),
                )
            })
            .collect();

        // A Givens rotation in the (0, 1) plane of the flat coordinates,
        // applied coordinate-wise; orthogonal, hence norm-preserving.
        let rotate = |v: &AmbientVector| -> AmbientVector {
            let mut flat = v.to_flat();
            let (c, s) = (0.6, 0.8);
            let (a, b) = (flat[0], flat[1]);
            flat[0] = c * a - s * b;
            flat[1] = s * a + c * b;
            AmbientVector::from_flat(v.p(), v.q(), &flat).unwrap()
        };

        let stat = |gens: &[(AmbientVector, AmbientVector)]| -> f64 {
            let st = structure_at(&spec, &signs, &pt).unwrap();
            let mut worst = 0.0_f64;
            for (cf, cg) in gens {
                let f = TangentFieldSpec::new(cf.clone());
                let g = TangentFieldSpec::new(cg.clone());
                let n_p = nijenhuis(&spec, &signs, &f, &g, &pt, &cfg).unwrap();
                let mut combo = n_p;
                for alpha in 0..st.codimension() {
                    let du_val = du(&spec, &signs, alpha, &f, &g, &pt, &cfg).unwrap();
                    combo = combo.add_scaled(-2.0 * du_val, &st.xi()[alpha]);
                }
                worst = worst.max(combo.inf_norm());
            }
            worst
        };

        let original = stat(&generators);
        let rotated: Vec<(AmbientVector, AmbientVector)> = generators
            .iter()
            .map(|(a, b)| (rotate(a), rotate(b)))
            .collect();
        let transformed = stat(&rotated);
        let ratio = transformed / original;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "statistic moved by {ratio:.3} ({original:.3e} -> {transformed:.3e})"
        );
    }
}
