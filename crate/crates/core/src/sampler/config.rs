use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorModel {
    /// Asymmetric Laplace errors: `gamma` pinned at zero.
    Al,
    /// Generalized asymmetric Laplace errors.
    Gal,
}

impl ErrorModel {
    pub fn gamma_fixed_at_zero(self) -> bool {
        self == ErrorModel::Al
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorModel::Al => "AL",
            ErrorModel::Gal => "GAL",
        }
    }
}

/// Target of the Metropolis step for `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GammaUpdate {
    /// Both latents integrated out: `gamma` and `sigma` move against the
    /// GAL likelihood given `beta`, then `s` and `v` are redrawn from their
    /// joint conditional.
    #[default]
    Marginal,
    /// Exponential latents integrated out (an asymmetric Laplace likelihood
    /// shifted by `sigma H(gamma) s_i`); `v` is redrawn afterwards.
    Collapsed,
    /// Conditional of `gamma` given every latent.
    Conditional,
}

/// `N(mean, covariance)` prior on the full coefficient vector. `mean` and
/// `variance` of length one are broadcast; a full `covariance` overrides
/// `variance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormalPrior {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub covariance: Option<Vec<Vec<f64>>>,
}

impl Default for NormalPrior {
    fn default() -> Self {
        Self {
            mean: vec![0.0],
            variance: vec![100.0],
            covariance: None,
        }
    }
}

impl NormalPrior {
    pub fn isotropic(mean: f64, variance: f64) -> Self {
        Self {
            mean: vec![mean],
            variance: vec![variance],
            covariance: None,
        }
    }

    fn broadcast(v: &[f64], p: usize, what: &str) -> Result<DVector<f64>> {
        match v.len() {
            1 => Ok(DVector::from_element(p, v[0])),
            len if len == p => Ok(DVector::from_column_slice(v)),
            len => Err(Error::Config(format!(
                "prior {what} has {len} entries for {p} coefficients"
            ))),
        }
    }

    pub fn mean_vector(&self, p: usize) -> Result<DVector<f64>> {
        Self::broadcast(&self.mean, p, "mean")
    }

    pub fn covariance_matrix(&self, p: usize) -> Result<DMatrix<f64>> {
        match &self.covariance {
            Some(rows) => {
                if rows.len() != p || rows.iter().any(|r| r.len() != p) {
                    return Err(Error::Config(format!("prior covariance must be {p} x {p}")));
                }
                Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
            }
            None => {
                let var = Self::broadcast(&self.variance, p, "variance")?;
                if var.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return Err(Error::Config("prior variances must be positive".into()));
                }
                Ok(DMatrix::from_diagonal(&var))
            }
        }
    }
}

/// Inverse-gamma `IG(shape, scale)` prior on `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseGammaPrior {
    pub shape: f64,
    pub scale: f64,
}

impl Default for InverseGammaPrior {
    fn default() -> Self {
        Self { shape: 2.0, scale: 2.0 }
    }
}

/// Beta prior on `(gamma - L) / (U - L)`; `(1, 1)` is uniform on `(L, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaledBetaPrior {
    pub a: f64,
    pub b: f64,
}

impl Default for RescaledBetaPrior {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

impl RescaledBetaPrior {
    /// Unnormalized log density at `u` in `(0, 1)`.
    pub fn log_density_unit(&self, u: f64) -> f64 {
        let mut v = 0.0;
        if self.a != 1.0 {
            v += (self.a - 1.0) * u.ln();
        }
        if self.b != 1.0 {
            v += (self.b - 1.0) * (1.0 - u).ln();
        }
        v
    }
}

/// Hierarchical Laplace prior on the slopes with a normal intercept and a
/// `Gamma(a_eta, rate b_eta)` prior on `eta^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LassoPriorConfig {
    pub intercept_mean: f64,
    pub intercept_variance: f64,
    pub a_eta: f64,
    pub b_eta: f64,
    /// Center and scale covariates before fitting; draws are reported on the
    /// original scale.
    pub standardize: bool,
}

impl Default for LassoPriorConfig {
    fn default() -> Self {
        Self {
            intercept_mean: 0.0,
            intercept_variance: 100.0,
            a_eta: 0.1,
            b_eta: 0.1,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub keep: usize,
    pub seed: u64,
    /// Initial standard deviation of the logit-scale proposal for `gamma`.
    pub gamma_step: f64,
    /// Acceptance rate the proposal scale is tuned toward during burn-in.
    pub target_acceptance: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            thin: 5,
            keep: 2_000,
            seed: 0,
            gamma_step: 1.0,
            target_acceptance: 0.35,
        }
    }
}

impl ChainConfig {
    pub fn total_iterations(&self) -> usize {
        self.burn_in + self.thin * self.keep
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantRegConfig {
    pub p0: f64,
    #[serde(default = "default_model")]
    pub model: ErrorModel,
    #[serde(default)]
    pub prior_beta: NormalPrior,
    /// When set, replaces `prior_beta` with the hierarchical Laplace prior.
    #[serde(default)]
    pub lasso: Option<LassoPriorConfig>,
    #[serde(default)]
    pub prior_sigma: InverseGammaPrior,
    #[serde(default)]
    pub prior_gamma: RescaledBetaPrior,
    #[serde(default)]
    pub gamma_update: GammaUpdate,
    #[serde(default)]
    pub chain: ChainConfig,
}

fn default_model() -> ErrorModel {
    ErrorModel::Gal
}

impl QuantRegConfig {
    pub fn new(p0: f64, model: ErrorModel) -> Self {
        Self {
            p0,
            model,
            prior_beta: NormalPrior::default(),
            lasso: None,
            prior_sigma: InverseGammaPrior::default(),
            prior_gamma: RescaledBetaPrior::default(),
            gamma_update: GammaUpdate::default(),
            chain: ChainConfig::default(),
        }
    }

    pub fn with_lasso(mut self, lasso: LassoPriorConfig) -> Self {
        self.lasso = Some(lasso);
        self
    }

    pub fn with_chain(mut self, chain: ChainConfig) -> Self {
        self.chain = chain;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return bad("p0 must lie in (0, 1)");
        }
        if !(self.prior_sigma.shape > 0.0 && self.prior_sigma.scale > 0.0) {
            return bad("prior_sigma shape and scale must be positive");
        }
        if !(self.prior_gamma.a > 0.0 && self.prior_gamma.b > 0.0) {
            return bad("prior_gamma shapes must be positive");
        }
        if let Some(l) = &self.lasso {
            if !(l.a_eta > 0.0 && l.b_eta > 0.0) {
                return bad("lasso a_eta and b_eta must be positive");
            }
            if !(l.intercept_variance > 0.0) {
                return bad("lasso intercept_variance must be positive");
            }
        }
        let c = &self.chain;
        if c.burn_in < 1 || c.thin < 1 || c.keep < 1 {
            return bad("burn_in, thin and keep must be at least 1");
        }
        if !(c.gamma_step > 0.0) || !(c.target_acceptance > 0.0 && c.target_acceptance < 1.0) {
            return bad("gamma_step must be positive and target_acceptance in (0, 1)");
        }
        Ok(())
    }
}
