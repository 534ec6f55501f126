//! Simulation study: correlated Gaussian designs, error laws pinned at the
//! target quantile, sparse and dense coefficient settings, and replicated
//! AL-versus-GAL comparisons summarized by median and SD.

mod law;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use law::{
    solve_quantile_offset, ErrorLaw, PinnedLaw, GPD_XI, LAPLACE_SCALE, MIXTURE_SHIFT, MIXTURE_VARIANCE, MIXTURE_WEIGHT,
    NORMAL_VARIANCE,
};

use crate::assess::{cie_score, mean_check_loss, ppl_check, ppl_quadratic};
use crate::data::Dataset;
use crate::diagnostics::{median, sd};
use crate::error::{Error, Result};
use crate::rng::{child_seed, stream_rng};
use crate::sampler::{
    fit, posterior_predictive_replicates, ChainConfig, ErrorModel, GammaUpdate, LassoPriorConfig, QuantRegConfig,
};

/// Number of covariates in the simulated designs.
pub const N_COVARIATES: usize = 8;
/// Correlation `rho^|i - j|` between covariates.
pub const DESIGN_CORRELATION: f64 = 0.5;
/// RNG streams reserved per replicate: stream `64 r` generates the data,
/// `64 r + 1 + m` seeds the chain of model `m` and `64 r + 32 + m` drives its
/// predictive replicates.
const STREAMS_PER_REPLICATE: u64 = 64;
const MAX_MODELS: usize = 31;

/// `n x 8` covariates with i.i.d. rows from `N(0, Sigma)`,
/// `Sigma_ij = 0.5^|i - j|`, generated by the stationary AR(1) recursion.
pub fn make_design<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let rho = DESIGN_CORRELATION;
    let innov = (1.0 - rho * rho).sqrt();
    let mut x = DMatrix::zeros(n, N_COVARIATES);
    for i in 0..n {
        let mut prev: f64 = rng.sample(StandardNormal);
        x[(i, 0)] = prev;
        for j in 1..N_COVARIATES {
            let z: f64 = rng.sample(StandardNormal);
            prev = rho * prev + innov * z;
            x[(i, j)] = prev;
        }
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSetting {
    /// `(3, 1.5, 0, 0, 2, 0, 0, 0)`
    Sparse,
    /// All slopes 0.85.
    Dense,
    /// `(5, 0, ..., 0)`
    VerySparse,
}

impl BetaSetting {
    pub const ALL: [BetaSetting; 3] = [BetaSetting::Sparse, BetaSetting::Dense, BetaSetting::VerySparse];

    pub fn slopes(self) -> [f64; N_COVARIATES] {
        match self {
            BetaSetting::Sparse => [3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0],
            BetaSetting::Dense => [0.85; N_COVARIATES],
            BetaSetting::VerySparse => [5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// Intercept (zero) followed by the slopes.
    pub fn coefficients(self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.slopes()).collect()
    }

    pub fn label(self) -> &'static str {
        match self {
            BetaSetting::Sparse => "sparse",
            BetaSetting::Dense => "dense",
            BetaSetting::VerySparse => "very_sparse",
        }
    }
}

/// One fitted model in a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimModel {
    pub model: ErrorModel,
    pub lasso: bool,
}

impl SimModel {
    pub fn label(&self) -> String {
        if self.lasso {
            format!("{}-lasso", self.model.label())
        } else {
            self.model.label().to_string()
        }
    }
}

fn default_models() -> Vec<SimModel> {
    vec![
        SimModel {
            model: ErrorModel::Al,
            lasso: true,
        },
        SimModel {
            model: ErrorModel::Gal,
            lasso: true,
        },
    ]
}

fn default_n() -> usize {
    100
}

fn default_replicates() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub p0: f64,
    pub error_law: ErrorLaw,
    pub beta_setting: BetaSetting,
    #[serde(default = "default_n")]
    pub n_train: usize,
    #[serde(default = "default_n")]
    pub n_test: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// `seed` inside is ignored; chain seeds derive from the master seed.
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default = "default_models")]
    pub models: Vec<SimModel>,
    #[serde(default)]
    pub lasso: LassoPriorConfig,
    #[serde(default)]
    pub gamma_update: GammaUpdate,
}

impl SimScenario {
    /// Desk-scale protocol: 20 replicates, burn-in 10,000, thin 5, keep 2,000,
    /// lasso AL and GAL fits.
    pub fn desk(p0: f64, error_law: ErrorLaw, beta_setting: BetaSetting) -> Self {
        Self {
            p0,
            error_law,
            beta_setting,
            n_train: default_n(),
            n_test: default_n(),
            replicates: default_replicates(),
            seed: 0,
            chain: ChainConfig::default(),
            models: default_models(),
            lasso: LassoPriorConfig::default(),
            gamma_update: GammaUpdate::default(),
        }
    }

    /// Full protocol: 100 replicates, burn-in 50,000, thin 20, keep 5,000.
    pub fn paper_scale(mut self) -> Self {
        self.replicates = 100;
        self.chain.burn_in = 50_000;
        self.chain.thin = 20;
        self.chain.keep = 5_000;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return bad(format!("p0 must lie in (0, 1), got {}", self.p0));
        }
        if self.n_train < N_COVARIATES + 2 || self.n_test < 1 || self.replicates < 1 {
            return bad(format!(
                "need n_train >= {}, n_test >= 1 and replicates >= 1",
                N_COVARIATES + 2
            ));
        }
        if self.models.is_empty() || self.models.len() > MAX_MODELS {
            return bad(format!("between 1 and {MAX_MODELS} models required"));
        }
        self.model_config(&self.models[0], 0).validate()
    }

    fn model_config(&self, model: &SimModel, seed: u64) -> QuantRegConfig {
        let mut cfg = QuantRegConfig::new(self.p0, model.model);
        cfg.gamma_update = self.gamma_update;
        cfg.chain = ChainConfig { seed, ..self.chain };
        if model.lasso {
            cfg = cfg.with_lasso(self.lasso);
        }
        cfg
    }
}

/// Training data, held-out design and the true coefficients of one
/// replicate.
#[derive(Debug, Clone)]
pub struct SimData {
    pub train: Dataset,
    /// Test design including the intercept column.
    pub test_x: DMatrix<f64>,
    pub beta: Vec<f64>,
}

/// Generate `y = x'beta + eps` with the error law pinned at `p0`.
pub fn generate_data<R: Rng + ?Sized>(scenario: &SimScenario, rng: &mut R) -> Result<SimData> {
    let law = PinnedLaw::new(scenario.error_law, scenario.p0)?;
    let beta = scenario.beta_setting.coefficients();
    let cov = make_design(scenario.n_train, rng);
    let slopes = DVector::from_column_slice(&beta[1..]);
    let mut y = &cov * slopes;
    for v in y.iter_mut() {
        *v += law.sample(rng);
    }
    let train = Dataset::from_covariates(&cov, y)?;
    let test_cov = make_design(scenario.n_test, rng);
    let mut test_x = DMatrix::from_element(scenario.n_test, N_COVARIATES + 1, 1.0);
    test_x.columns_mut(1, N_COVARIATES).copy_from(&test_cov);
    Ok(SimData { train, test_x, beta })
}

/// Criteria of one model on one replicate; `error` is set (and the criteria
/// left empty) when the fit failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub model: String,
    pub cie: Option<f64>,
    pub mcl: Option<f64>,
    pub ppl_quadratic: Option<f64>,
    pub ppl_check: Option<f64>,
    pub gamma_acceptance: Option<f64>,
    pub error: Option<String>,
}

pub const CRITERIA: [&str; 4] = ["cie", "mcl", "ppl_quadratic", "ppl_check"];

impl ReplicateRecord {
    pub fn criterion(&self, name: &str) -> Option<f64> {
        match name {
            "cie" => self.cie,
            "mcl" => self.mcl,
            "ppl_quadratic" => self.ppl_quadratic,
            "ppl_check" => self.ppl_check,
            _ => None,
        }
    }
}

fn evaluate(
    scenario: &SimScenario,
    data: &SimData,
    model: &SimModel,
    chain_seed: u64,
    predictive_stream: u64,
) -> Result<(f64, f64, f64, f64, Option<f64>)> {
    let cfg = scenario.model_config(model, chain_seed);
    let samples = fit(&data.train, &cfg)?;
    let cie = cie_score(&samples.beta, &data.train, &data.beta)?.mean;
    let mcl = mean_check_loss(&samples.beta_mean(), &data.beta, &data.test_x, scenario.p0)?;
    let mut rng = stream_rng(scenario.seed, predictive_stream);
    let reps = posterior_predictive_replicates(&samples, &data.train.x, &mut rng)?;
    let quad = ppl_quadratic(&reps, &data.train.y, f64::INFINITY)?.criterion;
    let check = ppl_check(&reps, &data.train.y, scenario.p0)?.criterion;
    Ok((cie, mcl, quad, check, samples.diagnostics.gamma_acceptance))
}

/// Generate the data of replicate `r` and fit every model to it.
pub fn run_replicate(scenario: &SimScenario, r: usize) -> Result<Vec<ReplicateRecord>> {
    let base = r as u64 * STREAMS_PER_REPLICATE;
    let mut data_rng = stream_rng(scenario.seed, base);
    let data = generate_data(scenario, &mut data_rng)?;
    Ok(scenario
        .models
        .iter()
        .enumerate()
        .map(|(m, model)| {
            let chain_seed = child_seed(scenario.seed, base + 1 + m as u64);
            let label = model.label();
            match evaluate(scenario, &data, model, chain_seed, base + 32 + m as u64) {
                Ok((cie, mcl, quad, check, acc)) => ReplicateRecord {
                    replicate: r,
                    model: label,
                    cie: Some(cie),
                    mcl: Some(mcl),
                    ppl_quadratic: Some(quad),
                    ppl_check: Some(check),
                    gamma_acceptance: acc,
                    error: None,
                },
                Err(e) => ReplicateRecord {
                    replicate: r,
                    model: label,
                    cie: None,
                    mcl: None,
                    ppl_quadratic: None,
                    ppl_check: None,
                    gamma_acceptance: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub model: String,
    pub criterion: String,
    pub median: f64,
    pub sd: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: SimScenario,
    pub records: Vec<ReplicateRecord>,
    pub summary: Vec<CriterionSummary>,
}

/// Median and SD of each criterion per model over the successful replicates.
pub fn summarize(models: &[SimModel], records: &[ReplicateRecord]) -> Vec<CriterionSummary> {
    let mut out = Vec::new();
    for model in models {
        let label = model.label();
        let mine: Vec<&ReplicateRecord> = records.iter().filter(|r| r.model == label).collect();
        let n_failed = mine.iter().filter(|r| r.error.is_some()).count();
        for crit in CRITERIA {
            let vals: Vec<f64> = mine.iter().filter_map(|r| r.criterion(crit)).collect();
            out.push(CriterionSummary {
                model: label.clone(),
                criterion: crit.to_string(),
                median: if vals.is_empty() { f64::NAN } else { median(&vals) },
                sd: sd(&vals),
                n_ok: vals.len(),
                n_failed,
            });
        }
    }
    out
}

/// Run every replicate in parallel (on the current rayon pool) and
/// summarize. Results depend only on the scenario, not on scheduling.
pub fn run_scenario(scenario: &SimScenario) -> Result<ScenarioResult> {
    scenario.validate()?;
    let per_rep: Vec<Vec<ReplicateRecord>> = (0..scenario.replicates)
        .into_par_iter()
        .map(|r| run_replicate(scenario, r))
        .collect::<Result<_>>()?;
    let records: Vec<ReplicateRecord> = per_rep.into_iter().flatten().collect();
    let summary = summarize(&scenario.models, &records);
    Ok(ScenarioResult {
        scenario: scenario.clone(),
        records,
        summary,
    })
}

impl ScenarioResult {
    pub fn summary_for(&self, model: &str, criterion: &str) -> Option<&CriterionSummary> {
        self.summary
            .iter()
            .find(|s| s.model == model && s.criterion == criterion)
    }

    pub fn write_records_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for s in &self.summary {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Text table: one row per criterion, one column per model, cells
    /// `median (SD)`.
    pub fn format_table(&self) -> String {
        let sc = &self.scenario;
        let labels: Vec<String> = sc.models.iter().map(SimModel::label).collect();
        let mut s = format!(
            "p0 = {}, errors = {}, beta = {}, replicates = {}\n",
            sc.p0,
            sc.error_law.label(),
            sc.beta_setting.label(),
            sc.replicates
        );
        s += &format!("{:<15}", "criterion");
        for l in &labels {
            s += &format!("{l:>20}");
        }
        s.push('\n');
        for crit in CRITERIA {
            s += &format!("{crit:<15}");
            for l in &labels {
                let cell = match self.summary_for(l, crit) {
                    Some(c) => format!("{:.3} ({:.3})", c.median, c.sd),
                    None => "-".into(),
                };
                s += &format!("{cell:>20}");
            }
            s.push('\n');
        }
        let failed: usize = self.records.iter().filter(|r| r.error.is_some()).count();
        if failed > 0 {
            s += &format!("failed fits: {failed}\n");
        }
        s
    }
}
