//! The JSON run configuration and its resolution into core types.
//!
//! Every field has a default, and deserialization fills them all in, so the
//! config embedded in an emitted report is fully explicit: a report plus the
//! library version pins the entire run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sphereprod::ambient::SignPattern;
use sphereprod::manifolds::SubmanifoldSpec;
use sphereprod::normality::FdConfig;
use sphereprod::verify::{SuiteConfig, SuiteTolerances};

use crate::CliError;

/// Radii cross-check threshold for user-supplied derived radii.
const RADII_CONSISTENCY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hypersphere,
    DoubleProduct,
    TripleProduct,
}

/// Named radii; which ones are required depends on the family. Supplying a
/// derived radius as well is allowed and cross-checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiConfig {
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r3: Option<f64>,
}

/// Either one sign for every z-coordinate or an explicit list of length q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SignsConfig {
    Uniform(f64),
    Explicit(Vec<f64>),
}

impl Default for SignsConfig {
    fn default() -> Self {
        SignsConfig::Uniform(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormalitySettings {
    /// Sample points for the finite-difference sweeps.
    pub points: usize,
    /// Random field pairs probed per point in the normality check.
    pub field_pairs: usize,
}

impl Default for NormalitySettings {
    fn default() -> Self {
        NormalitySettings {
            points: 100,
            field_pairs: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdSettings {
    pub h: f64,
    pub richardson: bool,
    pub du_half: bool,
}

impl Default for FdSettings {
    fn default() -> Self {
        FdSettings {
            h: 1e-5,
            richardson: false,
            du_half: false,
        }
    }
}

/// Assertion thresholds, keyed by check kind. Finite-difference rows that
/// have no pass/fail contract on a family (normality and commutation away
/// from the hypersphere) are reported with a null tolerance regardless.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSettings {
    pub algebraic: f64,
    pub composed: f64,
    pub agreement: f64,
    pub normality: f64,
    pub shape_operator: f64,
    pub commutation: f64,
    pub self_adjoint: f64,
    pub connection: f64,
}

impl Default for ToleranceSettings {
    fn default() -> Self {
        ToleranceSettings {
            algebraic: sphereprod::tol::ALGEBRAIC,
            composed: sphereprod::tol::COMPOSED,
            agreement: sphereprod::tol::ALGEBRAIC,
            normality: sphereprod::tol::FD_NORMALITY,
            shape_operator: sphereprod::tol::FD_SHAPE_OPERATOR,
            commutation: sphereprod::tol::FD_COMMUTATION,
            self_adjoint: sphereprod::tol::FD_SELF_ADJOINT,
            connection: sphereprod::tol::FD_CONNECTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            json: Some(PathBuf::from("report.json")),
            csv: Some(PathBuf::from("report.csv")),
        }
    }
}

/// One verification run, fully described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub p: usize,
    pub q: usize,
    pub radii: RadiiConfig,
    #[serde(default)]
    pub signs: SignsConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default = "default_n_vectors")]
    pub n_vectors: usize,
    #[serde(default)]
    pub normality: NormalitySettings,
    #[serde(default)]
    pub fd: FdSettings,
    #[serde(default)]
    pub tolerances: ToleranceSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_n_points() -> usize {
    1000
}

fn default_n_vectors() -> usize {
    10
}

/// The core-typed view of a validated config.
#[derive(Clone, Debug)]
pub struct ResolvedRun {
    pub spec: SubmanifoldSpec,
    pub signs: SignPattern,
    pub fd: FdConfig,
    pub suite: SuiteConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| CliError(format!("cannot read config {}: {err}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.resolve().map(|_| ())
    }

    /// Validate and convert to core types.
    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        if self.n_points == 0 || self.n_vectors == 0 {
            return Err(CliError(
                "n_points and n_vectors must be at least 1".to_string(),
            ));
        }
        let spec = self.build_spec()?;
        let signs = match &self.signs {
            SignsConfig::Uniform(s) => SignPattern::uniform(self.q, *s)
                .map_err(|err| CliError(format!("invalid signs: {err}")))?,
            SignsConfig::Explicit(list) => {
                if list.len() != self.q {
                    return Err(CliError(format!(
                        "sign list has length {}, expected q = {}",
                        list.len(),
                        self.q
                    )));
                }
                SignPattern::new(list.clone())
                    .map_err(|err| CliError(format!("invalid signs: {err}")))?
            }
        };
        let fd = FdConfig::new(self.fd.h)
            .map_err(|err| CliError(err.to_string()))?
            .with_richardson(self.fd.richardson)
            .with_du_half(self.fd.du_half);
        let suite = SuiteConfig {
            n_points: self.n_points,
            n_vectors: self.n_vectors,
            seed: self.seed,
            tols: SuiteTolerances {
                algebraic: self.tolerances.algebraic,
                composed: self.tolerances.composed,
                agreement: self.tolerances.agreement,
            },
        };
        Ok(ResolvedRun {
            spec,
            signs,
            fd,
            suite,
        })
    }

    fn build_spec(&self) -> Result<SubmanifoldSpec, CliError> {
        let radii = &self.radii;
        let require = |name: &str, value: Option<f64>| {
            value.ok_or_else(|| CliError(format!("family requires radius \"{name}\"")))
        };
        let reject = |name: &str, value: Option<f64>| {
            if value.is_some() {
                Err(CliError(format!(
                    "radius \"{name}\" does not apply to this family"
                )))
            } else {
                Ok(())
            }
        };
        let consistent = |label: &str, stated: Option<f64>, derived: f64| {
            if let Some(stated) = stated {
                if (stated * stated - derived * derived).abs() > RADII_CONSISTENCY {
                    return Err(CliError(format!(
                        "inconsistent radii: {label} = {stated} but derived value is {derived}"
                    )));
                }
            }
            Ok(())
        };
        let spec = match self.family {
            Family::Hypersphere => {
                reject("r", radii.r)?;
                reject("r1", radii.r1)?;
                reject("r2", radii.r2)?;
                reject("r3", radii.r3)?;
                SubmanifoldSpec::hypersphere(self.p, self.q, require("R", radii.big_r)?)
            }
            Family::DoubleProduct => {
                reject("r1", radii.r1)?;
                reject("r2", radii.r2)?;
                let r = require("r", radii.r)?;
                let r3 = require("r3", radii.r3)?;
                consistent("R", radii.big_r, (r * r + r3 * r3).sqrt())?;
                SubmanifoldSpec::double_product(self.p, self.q, r, r3)
            }
            Family::TripleProduct => {
                let r1 = require("r1", radii.r1)?;
                let r2 = require("r2", radii.r2)?;
                let r3 = require("r3", radii.r3)?;
                let r = (r1 * r1 + r2 * r2).sqrt();
                consistent("r", radii.r, r)?;
                consistent("R", radii.big_r, (r * r + r3 * r3).sqrt())?;
                SubmanifoldSpec::triple_product(self.p, self.q, r1, r2, r3)
            }
        };
        spec.map_err(|err| CliError(err.to_string()))
    }

    /// A copy with the derived radii filled in, for self-describing reports.
    pub fn with_derived_radii(&self) -> Result<RunConfig, CliError> {
        let spec = self.build_spec()?;
        let mut out = self.clone();
        match spec {
            SubmanifoldSpec::Hypersphere { .. } => {}
            SubmanifoldSpec::DoubleProduct { .. } => {
                out.radii.big_r = Some(spec.circumradius());
            }
            SubmanifoldSpec::TripleProduct { r1, r2, .. } => {
                out.radii.r = Some((r1 * r1 + r2 * r2).sqrt());
                out.radii.big_r = Some(spec.circumradius());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(family: &str, radii: &str) -> String {
        format!(r#"{{"family": "{family}", "p": 1, "q": 2, "radii": {radii}}}"#)
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(&minimal("hypersphere", r#"{"R": 1.0}"#)).unwrap();
        assert_eq!(cfg.n_points, 1000);
        assert_eq!(cfg.n_vectors, 10);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.fd.h, 1e-5);
        assert!(!cfg.fd.du_half);
        assert_eq!(cfg.signs, SignsConfig::Uniform(1.0));
        cfg.resolve().unwrap();
    }

    #[test]
    fn inconsistent_radii_are_rejected() {
        let cfg: RunConfig = serde_json::from_str(&minimal(
            "double_product",
            r#"{"r": 1.0, "r3": 1.0, "R": 2.0}"#,
        ))
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.0.contains("inconsistent"), "{err}");
    }

    #[test]
    fn consistent_derived_radii_are_accepted() {
        let big_r = (5.0_f64).sqrt();
        let json = format!(
            r#"{{"family": "double_product", "p": 1, "q": 2,
                 "radii": {{"r": 1.0, "r3": 2.0, "R": {big_r}}}}}"#
        );
        let cfg: RunConfig = serde_json::from_str(&json).unwrap();
        cfg.resolve().unwrap();
    }

    #[test]
    fn irrelevant_radii_are_rejected() {
        let cfg: RunConfig =
            serde_json::from_str(&minimal("hypersphere", r#"{"R": 1.0, "r3": 2.0}"#)).unwrap();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn explicit_sign_list_must_match_q() {
        let json = r#"{"family": "hypersphere", "p": 1, "q": 2,
                       "radii": {"R": 1.0}, "signs": [1, -1, 1]}"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        assert!(cfg.resolve().is_err());
        let json = r#"{"family": "hypersphere", "p": 1, "q": 2,
                       "radii": {"R": 1.0}, "signs": [1, -1]}"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        cfg.resolve().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = r#"{"family": "hypersphere", "p": 1, "q": 2,
                       "radii": {"R": 1.0}, "bogus": 3}"#;
        assert!(serde_json::from_str::<RunConfig>(json).is_err());
    }

    #[test]
    fn derived_radii_are_filled_for_reports() {
        let cfg: RunConfig = serde_json::from_str(&minimal(
            "double_product",
            r#"{"r": 1.0, "r3": 2.0}"#,
        ))
        .unwrap();
        let resolved = cfg.with_derived_radii().unwrap();
        assert!((resolved.radii.big_r.unwrap() - 5.0_f64.sqrt()).abs() < 1e-15);
    }
}
