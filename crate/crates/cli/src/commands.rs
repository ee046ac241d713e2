//! The three batch commands: `verify`, `table` and `sweep`.
//!
//! Commands compute outcomes and serialized artifacts; the binary decides
//! what to print and which exit code to use. Everything is single-threaded
//! and seeded, so rerunning a config byte-reproduces the artifacts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sphereprod::ambient::{inner, AmbientVector};
use sphereprod::induced::{closed_form_structure, oracle_structure, structure_deviation};
use sphereprod::manifolds::{sample_point, sample_tangent, SubmanifoldSpec};
use sphereprod::normality::{
    check_normality, normal_connection_residual, weingarten, FdConfig,
};
use sphereprod::rng::{derive_seed, Stream};
use sphereprod::tol;
use sphereprod::verify::{run_suite, Accumulator, IdentityResidual, ResidualReport};

use crate::config::{Family, RunConfig, SignsConfig};
use crate::output::{format_f64, identities_to_csv};
use crate::CliError;

/// Substream tags partitioning the seed between the sweeps.
const TAG_NORMALITY: u64 = 1;
const TAG_WEINGARTEN: u64 = 2;

/// Aggregate facts about the normality point sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalitySummary {
    pub points_used: u64,
    /// Points dropped by the |det(I − a²)| nondegeneracy gate.
    pub points_skipped: u64,
    pub min_abs_det_i_minus_a_sq: Option<f64>,
}

/// The complete emitted report: the fully-resolved config, the identity
/// rows of the algebraic suite plus the finite-difference rows, and the
/// normality sweep summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub config: RunConfig,
    pub report: ResidualReport,
    pub normality_summary: NormalitySummary,
}

impl FullReport {
    pub fn pass(&self) -> bool {
        self.report.pass
    }
}

/// Finite-difference residual rows appended after the algebraic suite.
/// Normality and commutation carry a tolerance only on the hypersphere
/// (totally umbilical, hence normal); on the products they are measured and
/// reported without a pass/fail contract.
fn differential_rows(
    config: &RunConfig,
    spec: &SubmanifoldSpec,
    signs: &sphereprod::ambient::SignPattern,
    fd: &FdConfig,
) -> Result<(Vec<IdentityResidual>, NormalitySummary), CliError> {
    let tols = &config.tolerances;
    let is_hypersphere = matches!(spec, SubmanifoldSpec::Hypersphere { .. });
    let uniform = signs.uniform_value().is_some();

    let mut normality_acc = Accumulator::default();
    let mut skipped = 0u64;
    let mut used = 0u64;
    let mut min_abs_det: Option<f64> = None;

    // The nondegeneracy gate belongs to the asserted hypersphere row. On the
    // product families det(I - a²) vanishes identically (ξ₂ is parallel to
    // ξ₁, so the Gram matrix I - a² is singular), the commutation theorem
    // does not apply, and the residual is reported over all points.
    let gate_on_det = is_hypersphere;

    let normality_root = Stream::new(derive_seed(config.seed, TAG_NORMALITY));
    for point_index in 0..config.normality.points {
        let mut stream = normality_root.substream(point_index as u64);
        let pt = sample_point(spec, &mut stream)?;
        let st = oracle_structure(spec, &pt, signs)?;
        let det = st.det_i_minus_a_sq();
        if gate_on_det && det.abs() <= tol::DET_NONDEGENERATE {
            skipped += 1;
            continue;
        }
        used += 1;
        min_abs_det = Some(min_abs_det.map_or(det.abs(), |m: f64| m.min(det.abs())));
        let pair_seed = stream.next_u64();
        let check = check_normality(spec, signs, &pt, fd, config.normality.field_pairs, pair_seed)?;
        normality_acc.add(check.max_residual);
    }

    let mut shape_acc = Accumulator::default();
    let mut commutation_acc = Accumulator::default();
    let mut self_adjoint_acc = Accumulator::default();
    let mut connection_acc = Accumulator::default();

    let weingarten_root = Stream::new(derive_seed(config.seed, TAG_WEINGARTEN));
    for point_index in 0..config.normality.points {
        let mut stream = weingarten_root.substream(point_index as u64);
        let pt = sample_point(spec, &mut stream)?;
        let x = sample_tangent(spec, &pt, &mut stream)?;
        let y = sample_tangent(spec, &pt, &mut stream)?;
        let st = if uniform {
            closed_form_structure(spec, &pt, signs)?
        } else {
            oracle_structure(spec, &pt, signs)?
        };
        for alpha in 0..spec.codimension() {
            let ax = weingarten(spec, alpha, &pt, &x, fd)?;
            let ay = weingarten(spec, alpha, &pt, &y, fd)?;
            self_adjoint_acc.add((inner(&ax, &y)? - inner(&x, &ay)?).abs());
            let p_ax = st.p_apply(&ax)?;
            let px = st.p_apply(&x)?;
            let a_px = weingarten(spec, alpha, &pt, &px, fd)?;
            commutation_acc.add(p_ax.sub(&a_px).inf_norm());
        }
        if let SubmanifoldSpec::Hypersphere { radius, .. } = spec {
            let ax = weingarten(spec, 0, &pt, &x, fd)?;
            shape_acc.add(ax.add_scaled(1.0 / radius, &x).inf_norm());
        }
        let connection = normal_connection_residual(spec, &pt, &x, fd)?;
        connection_acc.add(connection.inf_norm());
    }

    let gated = |asserted: bool, tolerance: f64| if asserted { tolerance } else { f64::INFINITY };
    let mut rows = vec![normality_acc.into_residual(
        "normality",
        gated(is_hypersphere, tols.normality),
    )];
    if is_hypersphere {
        rows.push(shape_acc.into_residual("weingarten_sphere_shape", tols.shape_operator));
    }
    rows.push(commutation_acc.into_residual(
        "weingarten_commutation",
        gated(is_hypersphere, tols.commutation),
    ));
    rows.push(self_adjoint_acc.into_residual("weingarten_self_adjoint", tols.self_adjoint));
    rows.push(connection_acc.into_residual("normal_connection", tols.connection));

    Ok((
        rows,
        NormalitySummary {
            points_used: used,
            points_skipped: skipped,
            min_abs_det_i_minus_a_sq: min_abs_det,
        },
    ))
}

/// Run the full pipeline for one config without touching the filesystem.
pub fn run_full(config: &RunConfig) -> Result<FullReport, CliError> {
    let resolved = config.resolve()?;
    let mut report = run_suite(&resolved.spec, &resolved.signs, &resolved.suite)?;
    let (rows, summary) = differential_rows(config, &resolved.spec, &resolved.signs, &resolved.fd)?;
    report.identities.extend(rows);
    report.refresh_pass();
    Ok(FullReport {
        config: config.with_derived_radii()?,
        report,
        normality_summary: summary,
    })
}

/// Outcome of `verify`: the report plus the exact bytes written to disk.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub full: FullReport,
    pub json: String,
    pub csv: String,
}

pub fn cmd_verify(config: &RunConfig) -> Result<VerifyOutcome, CliError> {
    let full = run_full(config)?;
    let mut json = serde_json::to_string_pretty(&full)
        .map_err(|err| CliError(format!("report serialization: {err}")))?;
    json.push('\n');
    let csv = identities_to_csv(&full.report.identities);
    if let Some(path) = &config.output.json {
        std::fs::write(path, &json)?;
    }
    if let Some(path) = &config.output.csv {
        std::fs::write(path, &csv)?;
    }
    Ok(VerifyOutcome { full, json, csv })
}

/// Outcome of `table`: the rendering and the worst closed-form/oracle
/// deviation over the printed quantities.
#[derive(Clone, Debug)]
pub struct TableOutcome {
    pub rendered: String,
    pub max_deviation: f64,
}

pub fn cmd_table(config: &RunConfig, point_csv: &str) -> Result<TableOutcome, CliError> {
    let resolved = config.resolve()?;
    let spec = &resolved.spec;
    let coords: Vec<f64> = point_csv
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError(format!("cannot parse point coordinate {tok:?}")))
        })
        .collect::<Result<_, _>>()?;
    let pt = AmbientVector::from_flat(spec.p(), spec.q(), &coords)
        .map_err(|err| CliError(err.to_string()))?;
    spec.ensure_on_manifold(&pt, tol::ON_MANIFOLD)
        .map_err(|err| CliError(err.to_string()))?;
    if resolved.signs.uniform_value().is_none() {
        return Err(CliError(
            "table requires a uniform sign pattern (closed forms)".to_string(),
        ));
    }

    let closed = closed_form_structure(spec, &pt, &resolved.signs)?;
    let oracle = oracle_structure(spec, &pt, &resolved.signs)?;
    let det_closed = closed.det_i_minus_a_sq();
    let det_oracle = oracle.det_i_minus_a_sq();
    let max_deviation =
        structure_deviation(&closed, &oracle).max((det_closed - det_oracle).abs());

    let c = spec.codimension();
    let mut out = String::new();
    out.push_str(&format!(
        "family: {:?}  (p = {}, q = {}, codimension {})\n",
        config.family,
        spec.p(),
        spec.q(),
        c
    ));
    out.push_str(&format!("point: [{}]\n", join_f64(&coords)));
    let radii = closed.radii();
    out.push_str(&format!(
        "sigma = {}   (r1, r2, r3, r, R) = ({}, {}, {}, {}, {})\n",
        format_f64(radii.sigma()),
        format_f64(radii.r1()),
        format_f64(radii.r2()),
        format_f64(radii.r3()),
        format_f64(radii.r()),
        format_f64(radii.circum()),
    ));
    out.push_str("tau evaluator: tau(X) = sum_i (x^i Y^i + y^i X^i) on tangent vectors\n\n");

    out.push_str(&format!("{:<14} {:<32} {:<32}\n", "quantity", "closed form", "oracle"));
    for i in 0..c {
        for j in 0..c {
            out.push_str(&format!(
                "{:<14} {:<32} {:<32}\n",
                format!("a[{i}][{j}]"),
                format_f64(closed.a().get(i, j)),
                format_f64(oracle.a().get(i, j)),
            ));
        }
    }
    for alpha in 0..c {
        out.push_str(&format!(
            "{:<14} [{}]\n{:<14} [{}]\n",
            format!("xi_{}", alpha + 1),
            join_f64(&closed.xi()[alpha].to_flat()),
            "",
            join_f64(&oracle.xi()[alpha].to_flat()),
        ));
    }
    out.push_str(&format!(
        "{:<14} {:<32} {:<32}\n",
        "det(I-a^2)",
        format_f64(det_closed),
        format_f64(det_oracle),
    ));
    out.push_str(&format!("\nmax deviation: {}\n", format_f64(max_deviation)));

    Ok(TableOutcome {
        rendered: out,
        max_deviation,
    })
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_f64(*v))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One sweep cell: the varied parameter value, the summary numbers used for
/// charting, and the full per-cell report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub param: String,
    pub value: f64,
    pub pass: bool,
    pub max_algebraic: f64,
    pub max_composed: f64,
    pub max_agreement: Option<f64>,
    pub normality: f64,
    pub min_abs_det_i_minus_a_sq: Option<f64>,
    pub report: FullReport,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub cells: Vec<SweepCell>,
    pub json: String,
    pub csv: String,
}

impl SweepOutcome {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|cell| cell.pass)
    }
}

fn patched_config(config: &RunConfig, param: &str, value: f64) -> Result<RunConfig, CliError> {
    let mut out = config.clone();
    // Cells own no files; the sweep writes the aggregate.
    out.output.json = None;
    out.output.csv = None;
    match (config.family, param) {
        (Family::Hypersphere, "R") => out.radii.big_r = Some(value),
        (Family::DoubleProduct, "r") => {
            out.radii.r = Some(value);
            out.radii.big_r = None;
        }
        (Family::DoubleProduct, "r3") => {
            out.radii.r3 = Some(value);
            out.radii.big_r = None;
        }
        (Family::TripleProduct, "r1") => {
            out.radii.r1 = Some(value);
            out.radii.r = None;
            out.radii.big_r = None;
        }
        (Family::TripleProduct, "r2") => {
            out.radii.r2 = Some(value);
            out.radii.r = None;
            out.radii.big_r = None;
        }
        (Family::TripleProduct, "r3") => {
            out.radii.r3 = Some(value);
            out.radii.r = None;
            out.radii.big_r = None;
        }
        (_, "sign") => {
            if value != 1.0 && value != -1.0 {
                return Err(CliError(format!(
                    "sign sweep values must be +1 or -1, got {value}"
                )));
            }
            out.signs = SignsConfig::Uniform(value);
        }
        (family, _) => {
            return Err(CliError(format!(
                "unknown sweep parameter {param:?} for family {family:?}"
            )));
        }
    }
    Ok(out)
}

fn summarize(param: &str, value: f64, full: FullReport) -> SweepCell {
    let mut max_algebraic = 0.0_f64;
    let mut max_composed = 0.0_f64;
    let mut max_agreement: Option<f64> = None;
    let mut normality = 0.0_f64;
    for row in &full.report.identities {
        if row.name.starts_with("p_cubed") {
            max_composed = max_composed.max(row.max_abs_err);
        } else if row.name.starts_with("agree_") {
            let cur = max_agreement.unwrap_or(0.0);
            max_agreement = Some(cur.max(row.max_abs_err));
        } else if row.name == "normality" {
            normality = row.max_abs_err;
        } else if row.name.ends_with("_oracle") || row.name.ends_with("_closed") {
            max_algebraic = max_algebraic.max(row.max_abs_err);
        }
    }
    SweepCell {
        param: param.to_string(),
        value,
        pass: full.pass(),
        max_algebraic,
        max_composed,
        max_agreement,
        normality,
        min_abs_det_i_minus_a_sq: full.normality_summary.min_abs_det_i_minus_a_sq,
        report: full,
    }
}

pub fn cmd_sweep(config: &RunConfig, param: &str, grid_csv: &str) -> Result<SweepOutcome, CliError> {
    let values: Vec<f64> = grid_csv
        .split(',')
        .filter(|tok| !tok.trim().is_empty())
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError(format!("cannot parse grid value {tok:?}")))
        })
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError("sweep grid is empty".to_string()));
    }

    let mut cells = Vec::with_capacity(values.len());
    for &value in &values {
        let cell_config = patched_config(config, param, value)?;
        let full = run_full(&cell_config)?;
        cells.push(summarize(param, value, full));
    }

    let mut json = serde_json::to_string_pretty(&cells)
        .map_err(|err| CliError(format!("sweep serialization: {err}")))?;
    json.push('\n');
    let mut csv = String::from(
        "param,value,pass,max_algebraic,max_composed,max_agreement,normality,min_abs_det\n",
    );
    for cell in &cells {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            cell.param,
            format_f64(cell.value),
            cell.pass,
            format_f64(cell.max_algebraic),
            format_f64(cell.max_composed),
            cell.max_agreement.map(format_f64).unwrap_or_default(),
            format_f64(cell.normality),
            cell.min_abs_det_i_minus_a_sq
                .map(format_f64)
                .unwrap_or_default(),
        ));
    }
    if let Some(path) = &config.output.json {
        std::fs::write(path, &json)?;
    }
    if let Some(path) = &config.output.csv {
        std::fs::write(path, &csv)?;
    }
    Ok(SweepOutcome { cells, json, csv })
}

/// Load a config from a path and fail with a config error message.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    RunConfig::load(path)
}
