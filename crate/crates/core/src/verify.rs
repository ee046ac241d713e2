//! Numerical verification of the pointwise identities satisfied by every
//! induced structure: the eight-identity suite and the cubic composition
//! identity, aggregated over deterministic random sweeps into a serializable
//! [`ResidualReport`].

use serde::{Deserialize, Serialize};

use crate::ambient::{inner, AmbientVector, SignPattern};
use crate::induced::{
    closed_form_structure, oracle_structure, structure_deviation, InducedStructure,
};
use crate::manifolds::{sample_point, sample_tangent, SubmanifoldSpec};
use crate::rng::Stream;
use crate::tol;
use crate::Result;

/// Names of the eight identities checked by [`check_theorem_2_1`], in the
/// order of the returned residuals:
///
/// 1. `p_squared`  — P²X = ε(X − Σ u_α(X) ξ_α)
/// 2. `u_of_px`    — u_α(PX) = −Σ_β a_{βα} u_β(X)
/// 3. `a_symmetry` — a_{αβ} = ε a_{βα}
/// 4. `u_of_xi`    — u_α(ξ_β) = δ_{αβ} − ε (a²)_{αβ}
/// 5. `p_of_xi`    — Pξ_α = −Σ_β a_{αβ} ξ_β
/// 6. `u_is_gram`  — u_α(X) = ⟨X, ξ_α⟩
/// 7. `p_adjoint`  — ⟨PX, Y⟩ = ε ⟨X, PY⟩
/// 8. `p_isometry` — ⟨PX, PY⟩ = ⟨X, Y⟩ − Σ u_α(X) u_α(Y)
pub const IDENTITY_NAMES: [&str; 8] = [
    "p_squared",
    "u_of_px",
    "a_symmetry",
    "u_of_xi",
    "p_of_xi",
    "u_is_gram",
    "p_adjoint",
    "p_isometry",
];

/// Max absolute violations of the eight structure identities at one point,
/// for one tangent pair (X, Y). `epsilon` is the structural sign of the
/// ambient operator; the flat block-swap ambient always has ε = +1, but the
/// checker stays parameterized.
pub fn check_theorem_2_1(
    st: &InducedStructure,
    x: &AmbientVector,
    y: &AmbientVector,
    epsilon: f64,
) -> Result<[f64; 8]> {
    let spec = st.spec();
    spec.ensure_tangent(st.point(), x, tol::TANGENCY_GUARD)?;
    spec.ensure_tangent(st.point(), y, tol::TANGENCY_GUARD)?;
    let c = st.codimension();
    let a = st.a();

    let ux = st.u_form(x)?;
    let uy = st.u_form(y)?;
    let px = st.p_apply(x)?;
    let py = st.p_apply(y)?;
    let ppx = st.p_apply(&px)?;

    // (i) P²X − ε(X − Σ u_α(X) ξ_α)
    let mut want = x.clone();
    for (alpha, &u) in ux.iter().enumerate() {
        want = want.add_scaled(-u, &st.xi()[alpha]);
    }
    let res_i = ppx.sub(&want.scaled(epsilon)).inf_norm();

    // (ii) u_α(PX) + Σ_β a_{βα} u_β(X)
    let upx = st.u_form(&px)?;
    let mut res_ii = 0.0_f64;
    for (alpha, &u_px) in upx.iter().enumerate() {
        let mut acc = u_px;
        for (beta, &u_x) in ux.iter().enumerate() {
            acc += a.get(beta, alpha) * u_x;
        }
        res_ii = res_ii.max(acc.abs());
    }

    // (iii) a_{αβ} − ε a_{βα}
    let mut res_iii = 0.0_f64;
    for alpha in 0..c {
        for beta in 0..c {
            res_iii = res_iii.max((a.get(alpha, beta) - epsilon * a.get(beta, alpha)).abs());
        }
    }

    // (iv) u_α(ξ_β) − (δ_{αβ} − ε (a²)_{αβ})
    let a_sq = a.mul(a);
    let mut res_iv = 0.0_f64;
    for beta in 0..c {
        let u_xi = st.u_form(&st.xi()[beta])?;
        for (alpha, &u) in u_xi.iter().enumerate() {
            let kronecker = if alpha == beta { 1.0 } else { 0.0 };
            res_iv = res_iv.max((u - (kronecker - epsilon * a_sq.get(alpha, beta))).abs());
        }
    }

    // (v) Pξ_α + Σ_β a_{αβ} ξ_β
    let mut res_v = 0.0_f64;
    for alpha in 0..c {
        let mut acc = st.p_apply(&st.xi()[alpha])?;
        for beta in 0..c {
            acc = acc.add_scaled(a.get(alpha, beta), &st.xi()[beta]);
        }
        res_v = res_v.max(acc.inf_norm());
    }

    // (vi) u_α(X) − ⟨X, ξ_α⟩
    let mut res_vi = 0.0_f64;
    for (alpha, &u) in ux.iter().enumerate() {
        res_vi = res_vi.max((u - inner(x, &st.xi()[alpha])?).abs());
    }

    // (vii) ⟨PX, Y⟩ − ε ⟨X, PY⟩
    let res_vii = (inner(&px, y)? - epsilon * inner(x, &py)?).abs();

    // (viii) ⟨PX, PY⟩ − ⟨X, Y⟩ + Σ u_α(X) u_α(Y)
    let u_pair: f64 = ux.iter().zip(uy.iter()).map(|(a, b)| a * b).sum();
    let res_viii = (inner(&px, &py)? - inner(x, y)? + u_pair).abs();

    Ok([
        res_i, res_ii, res_iii, res_iv, res_v, res_vi, res_vii, res_viii,
    ])
}

/// Residual of the cubic composition identity
/// `P³X = εPX + Σ_{α,β} a_{αβ} ⟨X, ξ_β⟩ ξ_α`, the induced-operator reading of
/// the three-fold application.
pub fn check_eq_2_4(st: &InducedStructure, x: &AmbientVector, epsilon: f64) -> Result<f64> {
    st.spec().ensure_tangent(st.point(), x, tol::TANGENCY_GUARD)?;
    let c = st.codimension();
    let px = st.p_apply(x)?;
    let p3x = st.p_apply(&st.p_apply(&px)?)?;
    let mut rhs = px.scaled(epsilon);
    for alpha in 0..c {
        for beta in 0..c {
            let coeff = st.a().get(alpha, beta) * inner(x, &st.xi()[beta])?;
            rhs = rhs.add_scaled(coeff, &st.xi()[alpha]);
        }
    }
    Ok(p3x.sub(&rhs).inf_norm())
}

/// Tolerances applied by [`run_suite`]. Use `f64::INFINITY` to report a
/// residual without asserting it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteTolerances {
    /// The eight pointwise identities.
    pub algebraic: f64,
    /// The cubic composition identity (one extra application of P).
    pub composed: f64,
    /// Closed-form vs oracle agreement on a, ξ, u and P.
    pub agreement: f64,
}

impl Default for SuiteTolerances {
    fn default() -> Self {
        SuiteTolerances {
            algebraic: tol::ALGEBRAIC,
            composed: tol::COMPOSED,
            agreement: tol::ALGEBRAIC,
        }
    }
}

/// Sample sizes and seed of a verification sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n_points: usize,
    pub n_vectors: usize,
    pub seed: u64,
    pub tols: SuiteTolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_points: 1000,
            n_vectors: 10,
            seed: 0,
            tols: SuiteTolerances::default(),
        }
    }
}

/// One named residual statistic. `tol: None` means report-only (serialized
/// as null; infinity has no JSON literal).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub max_abs_err: f64,
    pub mean_abs_err: f64,
    pub samples: u64,
    pub tol: Option<f64>,
    pub pass: bool,
}

/// Provenance of the sweep a report came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub spec: SubmanifoldSpec,
    pub signs: SignPattern,
    pub seed: u64,
    pub n_points: usize,
    pub n_vectors: usize,
    pub epsilon: f64,
}

/// Aggregated residuals of one sweep; `pass` is the conjunction of the rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub metadata: ReportMetadata,
    pub identities: Vec<IdentityResidual>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn get(&self, name: &str) -> Option<&IdentityResidual> {
        self.identities.iter().find(|row| row.name == name)
    }

    /// Recompute `pass` from the rows (used after appending rows).
    pub fn refresh_pass(&mut self) {
        self.pass = self.identities.iter().all(|row| row.pass);
    }
}

/// Running max/mean accumulator for one residual statistic.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    max: f64,
    sum: f64,
    count: u64,
}

impl Accumulator {
    pub fn add(&mut self, value: f64) {
        self.max = self.max.max(value);
        self.sum += value;
        self.count += 1;
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn into_residual(self, name: &str, tol: f64) -> IdentityResidual {
        let mean = if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        };
        IdentityResidual {
            name: name.to_string(),
            max_abs_err: self.max,
            mean_abs_err: mean,
            samples: self.count,
            tol: tol.is_finite().then_some(tol),
            pass: self.max < tol,
        }
    }
}

/// Sweep `n_points` sampled points with `n_vectors` tangent pairs each,
/// checking the full identity suite on the oracle structure and, when the
/// sign pattern is uniform, on the closed-form structure plus the
/// closed-form/oracle agreement. Deterministic in the seed: point `i` draws
/// from substream `i` regardless of evaluation order.
pub fn run_suite(
    spec: &SubmanifoldSpec,
    signs: &SignPattern,
    cfg: &SuiteConfig,
) -> Result<ResidualReport> {
    spec.validate()?;
    let epsilon = 1.0;
    let uniform = signs.uniform_value().is_some();
    let root = Stream::new(cfg.seed);

    let mut thm_oracle: Vec<Accumulator> = (0..8).map(|_| Accumulator::default()).collect();
    let mut thm_closed: Vec<Accumulator> = (0..8).map(|_| Accumulator::default()).collect();
    let mut eq24_oracle = Accumulator::default();
    let mut eq24_closed = Accumulator::default();
    let mut agree_struct = Accumulator::default();
    let mut agree_u = Accumulator::default();
    let mut agree_p = Accumulator::default();

    for point_index in 0..cfg.n_points {
        let mut stream = root.substream(point_index as u64);
        let pt = sample_point(spec, &mut stream)?;
        let oracle = oracle_structure(spec, &pt, signs)?;
        let closed = if uniform {
            let cf = closed_form_structure(spec, &pt, signs)?;
            agree_struct.add(structure_deviation(&cf, &oracle));
            Some(cf)
        } else {
            None
        };

        for _ in 0..cfg.n_vectors {
            let x = sample_tangent(spec, &pt, &mut stream)?;
            let y = sample_tangent(spec, &pt, &mut stream)?;

            for (acc, res) in thm_oracle
                .iter_mut()
                .zip(check_theorem_2_1(&oracle, &x, &y, epsilon)?)
            {
                acc.add(res);
            }
            eq24_oracle.add(check_eq_2_4(&oracle, &x, epsilon)?);

            if let Some(cf) = &closed {
                for (acc, res) in thm_closed
                    .iter_mut()
                    .zip(check_theorem_2_1(cf, &x, &y, epsilon)?)
                {
                    acc.add(res);
                }
                eq24_closed.add(check_eq_2_4(cf, &x, epsilon)?);

                let du = cf
                    .u_form(&x)?
                    .iter()
                    .zip(oracle.u_form(&x)?)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                agree_u.add(du);
                agree_p.add(cf.p_apply(&x)?.sub(&oracle.p_apply(&x)?).inf_norm());
            }
        }
    }

    let tols = &cfg.tols;
    let mut identities = Vec::new();
    for (acc, name) in thm_oracle.into_iter().zip(IDENTITY_NAMES) {
        identities.push(acc.into_residual(&format!("{name}_oracle"), tols.algebraic));
    }
    identities.push(eq24_oracle.into_residual("p_cubed_oracle", tols.composed));
    if uniform {
        for (acc, name) in thm_closed.into_iter().zip(IDENTITY_NAMES) {
            identities.push(acc.into_residual(&format!("{name}_closed"), tols.algebraic));
        }
        identities.push(eq24_closed.into_residual("p_cubed_closed", tols.composed));
        identities.push(agree_struct.into_residual("agree_a_xi", tols.agreement));
        identities.push(agree_u.into_residual("agree_u", tols.agreement));
        identities.push(agree_p.into_residual("agree_p", tols.agreement));
    }

    let mut report = ResidualReport {
        metadata: ReportMetadata {
            spec: spec.clone(),
            signs: signs.clone(),
            seed: cfg.seed,
            n_points: cfg.n_points,
            n_vectors: cfg.n_vectors,
            epsilon,
        },
        identities,
        pass: false,
    };
    report.refresh_pass();
    Ok(report)
}
