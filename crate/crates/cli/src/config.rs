//! JSON model configuration.
//!
//! ```json
//! {
//!   "n": 3,
//!   "marginals": [{"family": "scaled-uniform", "q0": 0.5, "scale": 1.0}, ...],
//!   "allocation": {"strategy": "trivariate-lambda", "lambda": 0.4},
//!   "copulas": {"1,3": {"family": "comonotone"}},
//!   "distortions": {"1": {"family": "linear-truncation", "a": 0.125, "b": 0.5}},
//!   "seed": 7
//! }
//! ```
//!
//! Faces without a copula entry get the independence copula; coordinates
//! without a distortion entry use the canonical scale.

use std::collections::BTreeMap;
use std::path::Path;

use jointex_core::allocation::{
    enumerate_faces, feasible_allocation, trivariate_lambda_bounds, AllocationStrategy,
    FaceAllocation, FaceSet,
};
use jointex_core::copulas::CopulaSpec;
use jointex_core::distortions::DistortionSpec;
use jointex_core::marginals::MarginalSpec;
use jointex_core::model::JeModel;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub marginals: Vec<MarginalConfig>,
    #[serde(default)]
    pub allocation: AllocationConfig,
    #[serde(default)]
    pub copulas: BTreeMap<String, CopulaConfig>,
    #[serde(default)]
    pub distortions: BTreeMap<String, DistortionConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MarginalConfig {
    ScaledUniform { q0: f64, scale: f64 },
    ScaledExponential { q0: f64, rate: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    PointMassAtZero {},
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationConfig {
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    /// Face masses for the `explicit` strategy.
    #[serde(default)]
    pub p: Option<BTreeMap<String, f64>>,
}

fn default_strategy() -> String {
    "max-face-mass".into()
}

impl Default for AllocationConfig {
    fn default() -> Self {
        Self { strategy: default_strategy(), lambda: None, t: None, p: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CopulaConfig {
    Independence {
        #[serde(default)]
        dimension: Option<usize>,
    },
    Comonotone {
        #[serde(default)]
        dimension: Option<usize>,
    },
    Countermonotone {
        #[serde(default)]
        dimension: Option<usize>,
    },
    Mixture {
        #[serde(default)]
        dimension: Option<usize>,
        components: Vec<MixtureComponent>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub copula: CopulaConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistortionConfig {
    IdentityCanonical {},
    LinearTruncation { a: f64, b: f64 },
    Power { a: f64, b: f64, gamma: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl ModelConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.marginals.len() != cfg.n {
            return Err(CliError::Config(format!(
                "n = {} but {} marginals are given",
                cfg.n,
                cfg.marginals.len()
            )));
        }
        Ok(cfg)
    }

    pub fn marginals(&self) -> Result<Vec<MarginalSpec>, CliError> {
        self.marginals
            .iter()
            .map(|m| {
                Ok(match m {
                    MarginalConfig::ScaledUniform { q0, scale } => {
                        MarginalSpec::scaled_uniform(*q0, *scale)?
                    }
                    MarginalConfig::ScaledExponential { q0, rate } => {
                        MarginalSpec::scaled_exponential(*q0, *rate)?
                    }
                    MarginalConfig::PiecewiseLinear { knots } => {
                        MarginalSpec::piecewise_linear(knots.clone())?
                    }
                    MarginalConfig::PointMassAtZero {} => MarginalSpec::point_mass_at_zero(),
                })
            })
            .collect()
    }

    pub fn q0(&self) -> Result<Vec<f64>, CliError> {
        Ok(self.marginals()?.iter().map(MarginalSpec::q0).collect())
    }

    /// Per-coordinate distortions, or `None` when no entry is given.
    pub fn distortions(
        &self,
        marginals: &[MarginalSpec],
    ) -> Result<Option<Vec<Option<DistortionSpec>>>, CliError> {
        if self.distortions.is_empty() {
            return Ok(None);
        }
        let mut out = vec![None; self.n];
        for (key, d) in &self.distortions {
            let i: usize = key
                .trim()
                .parse()
                .ok()
                .filter(|&i| i >= 1 && i <= self.n)
                .ok_or_else(|| CliError::Config(format!("bad distortion index {key:?}")))?;
            out[i - 1] = Some(match d {
                DistortionConfig::IdentityCanonical {} => {
                    DistortionSpec::identity(marginals[i - 1].q0())?
                }
                DistortionConfig::LinearTruncation { a, b } => DistortionSpec::linear(*a, *b)?,
                DistortionConfig::Power { a, b, gamma } => DistortionSpec::power(*a, *b, *gamma)?,
                DistortionConfig::Tabulated { knots } => DistortionSpec::tabulated(knots.clone())?,
            });
        }
        Ok(Some(out))
    }

    /// Axis capacities: `F̄_i(0)`, or `G_i*` for distorted coordinates.
    pub fn caps(&self) -> Result<Vec<f64>, CliError> {
        let marginals = self.marginals()?;
        let distortions = self.distortions(&marginals)?;
        marginals
            .iter()
            .enumerate()
            .map(|(i, m)| match distortions.as_ref().and_then(|d| d[i].as_ref()) {
                Some(g) => g.g_star(m).map_err(|e| match e {
                    jointex_core::Error::Pairing { b, q0, .. } => {
                        jointex_core::Error::Pairing { index: i, b, q0 }.into()
                    }
                    other => other.into(),
                }),
                None => Ok(m.q0()),
            })
            .collect()
    }

    pub fn strategy(&self) -> Result<AllocationStrategy, CliError> {
        let a = &self.allocation;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("strategy {:?} needs {name}", a.strategy)))
        };
        match a.strategy.as_str() {
            "max-face-mass" => Ok(AllocationStrategy::MaxFaceMass),
            "scaled" => Ok(AllocationStrategy::Scaled(need(a.t, "t")?)),
            "trivariate-lambda" => {
                Ok(AllocationStrategy::TrivariateLambda(need(a.lambda, "lambda")?))
            }
            other => Err(CliError::Config(format!("unknown allocation strategy {other:?}"))),
        }
    }

    pub fn allocation(&self) -> Result<FaceAllocation, CliError> {
        let q0 = self.q0()?;
        let caps = self.caps()?;
        if self.allocation.strategy == "explicit" {
            let p = self
                .allocation
                .p
                .as_ref()
                .ok_or_else(|| CliError::Config("strategy \"explicit\" needs p".into()))?;
            let masses = p
                .iter()
                .map(|(k, &v)| Ok((k.parse::<FaceSet>()?, v)))
                .collect::<Result<Vec<_>, CliError>>()?;
            return Ok(FaceAllocation::from_masses(self.n, &masses, caps)?);
        }
        let strategy = self.strategy()?;
        feasible_allocation(&q0, &caps, strategy).map_err(|e| match (e, strategy) {
            (
                jointex_core::Error::Domain { what: "lambda", value },
                AllocationStrategy::TrivariateLambda(_),
            ) => match trivariate_lambda_bounds(&q0, &caps) {
                Ok((lo, hi)) => CliError::Config(format!(
                    "lambda = {value} is outside the admissible interval [{lo}, {hi}]"
                )),
                Err(e) => e.into(),
            },
            (e, _) => e.into(),
        })
    }

    /// Copulas in face order; unlisted faces get independence.
    pub fn copulas(&self) -> Result<Vec<CopulaSpec>, CliError> {
        let faces = enumerate_faces(self.n)?;
        let mut given: BTreeMap<FaceSet, &CopulaConfig> = BTreeMap::new();
        for (key, c) in &self.copulas {
            let face: FaceSet = key.parse()?;
            if !faces.contains(&face) {
                return Err(CliError::Config(format!("{key:?} is not a face for n = {}", self.n)));
            }
            if given.insert(face, c).is_some() {
                return Err(CliError::Config(format!("face {key:?} listed twice")));
            }
        }
        faces
            .iter()
            .map(|f| match given.get(f) {
                Some(c) => copula(c, f.len()),
                None => Ok(CopulaSpec::independence(f.len())?),
            })
            .collect()
    }

    pub fn build(&self) -> Result<JeModel, CliError> {
        let marginals = self.marginals()?;
        let distortions = self.distortions(&marginals)?;
        let allocation = self.allocation()?;
        let copulas = self.copulas()?;
        Ok(JeModel::build(marginals, allocation, copulas, distortions)?)
    }
}

fn copula(c: &CopulaConfig, face_dim: usize) -> Result<CopulaSpec, CliError> {
    let check = |d: &Option<usize>| match d {
        Some(d) if *d != face_dim => Err(CliError::Config(format!(
            "copula dimension {d} does not match face size {face_dim}"
        ))),
        _ => Ok(()),
    };
    Ok(match c {
        CopulaConfig::Independence { dimension } => {
            check(dimension)?;
            CopulaSpec::independence(face_dim)?
        }
        CopulaConfig::Comonotone { dimension } => {
            check(dimension)?;
            CopulaSpec::comonotone(face_dim)?
        }
        CopulaConfig::Countermonotone { dimension } => {
            check(dimension)?;
            if face_dim != 2 {
                return Err(CliError::Config(format!(
                    "countermonotone copula needs a 2-dimensional face, got {face_dim}"
                )));
            }
            CopulaSpec::countermonotone()
        }
        CopulaConfig::Mixture { dimension, components } => {
            check(dimension)?;
            let parts = components
                .iter()
                .map(|m| Ok((m.weight, copula(&m.copula, face_dim)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            CopulaSpec::mixture(parts)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "n": 3,
        "marginals": [
            {"family": "scaled-uniform", "q0": 0.5, "scale": 1.0},
            {"family": "scaled-uniform", "q0": 0.5, "scale": 1.0},
            {"family": "scaled-uniform", "q0": 0.5, "scale": 1.0}
        ],
        "allocation": {"strategy": "trivariate-lambda", "lambda": 0.4},
        "copulas": {
            "1,2": {"family": "independence", "dimension": 2},
            "1,3": {"family": "comonotone"},
            "2,3": {"family": "countermonotone"}
        },
        "seed": 7
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ModelConfig::parse(EXAMPLE).unwrap();
        let m = cfg.build().unwrap();
        assert!((m.origin_mass() - 0.1).abs() < 1e-12);
        assert_eq!(cfg.seed, Some(7));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ModelConfig::parse(&EXAMPLE.replace("\"n\": 3", "\"n\": 4")).is_err());
        let bad_face = EXAMPLE.replace("\"1,2\"", "\"1,2,3\"");
        assert!(ModelConfig::parse(&bad_face).unwrap().copulas().is_err());
        let bad_family = EXAMPLE.replace("comonotone\"}", "clayton\"}");
        assert!(ModelConfig::parse(&bad_family).is_err());
        let bad_dim = EXAMPLE.replace("\"dimension\": 2", "\"dimension\": 3");
        assert!(ModelConfig::parse(&bad_dim).unwrap().copulas().is_err());
    }

    #[test]
    fn distorted_config_uses_g_star_caps() {
        let text = EXAMPLE
            .replace(
                "\"seed\": 7",
                r#""distortions": {
                "1": {"family": "linear-truncation", "a": 0.125, "b": 0.5},
                "2": {"family": "linear-truncation", "a": 0.125, "b": 0.5},
                "3": {"family": "linear-truncation", "a": 0.125, "b": 0.5}
            }"#,
            )
            .replace("0.4}", "0.2}");
        let cfg = ModelConfig::parse(&text).unwrap();
        assert_eq!(cfg.caps().unwrap(), vec![0.375; 3]);
        let m = cfg.build().unwrap();
        assert!(m.is_distorted());
    }

    #[test]
    fn explicit_allocation() {
        let text = EXAMPLE.replace(
            r#""strategy": "trivariate-lambda", "lambda": 0.4"#,
            r#""strategy": "explicit", "p": {"1,2": 0.25, "1,3": 0.25, "2,3": 0.25}"#,
        );
        let m = ModelConfig::parse(&text).unwrap().build().unwrap();
        assert!(m.axis_mass().iter().all(|a| a.abs() < 1e-12));
    }
}
