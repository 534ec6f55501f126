//! TOML configuration of the `fit` and `assess` commands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use galqr_core::sampler::{ErrorModel, QuantRegConfig};
use serde::{Deserialize, Serialize};

/// A derived covariate `name = column^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transform {
    pub name: String,
    pub column: String,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSpec {
    pub response: String,
    /// Covariate columns in order; defaults to every column other than the
    /// response and the censoring flag.
    pub covariates: Option<Vec<String>>,
    /// 0/1 column marking left-censored rows; setting it selects the Tobit
    /// sampler.
    pub censored: Option<String>,
    pub threshold: f64,
    /// Derived covariates appended after the listed ones.
    pub transforms: Vec<Transform>,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            response: "y".into(),
            covariates: None,
            censored: None,
            threshold: 0.0,
            transforms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Posterior draws averaged for the predictive error density.
    pub density_draws: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { density_draws: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitFile {
    #[serde(default)]
    pub data: DataSpec,
    pub model: QuantRegConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

impl FitFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Configuration used when no file is given: the `p0` flag is then
    /// required.
    pub fn from_p0(p0: Option<f64>) -> Result<Self> {
        let Some(p0) = p0 else {
            bail!("either --config or --p0 is required");
        };
        Ok(Self {
            data: DataSpec::default(),
            model: QuantRegConfig::new(p0, ErrorModel::Gal),
            output: OutputSpec::default(),
        })
    }
}
