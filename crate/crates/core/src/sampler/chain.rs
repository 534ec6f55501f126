use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{ErrorModel, GammaUpdate, QuantRegConfig};
use super::lasso::{update_eta2, update_omega, LassoLatents};
use super::marginal::{shape_scale_move, update_s_marginal, ShapeScaleKind, ShapeScaleTarget};
use super::tobit::update_w;
use super::updates::{
    update_beta, update_gamma, update_s, update_sigma, update_v, ChainState, GammaStep, GaussianPrior,
};
use crate::data::{Dataset, Standardizer};
use crate::diagnostics::{effective_sample_size, ParamSummary};
use crate::error::{Error, Result};
use crate::gal::{GalShape, GammaSupport};
use crate::kernels::sample_truncnorm_positive;
use crate::rng::stream_rng;

/// Exponent of the Robbins-Monro gain `t^-0.6` used to tune the random-walk
/// proposals during burn-in.
const ADAPT_DECAY: f64 = 0.6;
const MIN_LOG_STEP: f64 = -7.0;
const MAX_LOG_STEP: f64 = 4.0;

/// Log proposal scale tuned toward a target acceptance probability.
#[derive(Debug, Clone, Copy)]
struct AdaptiveStep {
    log_step: f64,
}

impl AdaptiveStep {
    fn new(step: f64) -> Self {
        Self { log_step: step.ln() }
    }

    fn step(&self) -> f64 {
        self.log_step.exp()
    }

    fn adapt(&mut self, t: usize, accept_prob: f64, target: f64) {
        let gain = ((t + 1) as f64).powf(-ADAPT_DECAY);
        self.log_step = (self.log_step + gain * (accept_prob - target)).clamp(MIN_LOG_STEP, MAX_LOG_STEP);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEss {
    pub name: String,
    pub ess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    /// Fraction of accepted `gamma` proposals after burn-in (`None` for AL).
    pub gamma_acceptance: Option<f64>,
    /// Fraction accepted during burn-in, while the proposal was adapting.
    pub burn_in_acceptance: Option<f64>,
    /// Logit-scale proposal standard deviation frozen at the end of burn-in.
    pub gamma_step: Option<f64>,
    /// Coefficient draws that needed diagonal jitter.
    pub jitter_events: usize,
    pub ess: Vec<ParamEss>,
    pub warnings: Vec<String>,
}

/// Thinned post-burn-in draws. Coefficients are on the scale of the design
/// passed in, even when the lasso sampler standardized it internally.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub config: QuantRegConfig,
    pub support: GammaSupport,
    /// 1-based iteration index of each retained draw.
    pub iterations: Vec<usize>,
    /// One row per draw: `beta_0 .. beta_d`.
    pub beta: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Lasso scales `omega_1 .. omega_d` (standardized-design scale).
    pub omega: Option<Vec<Vec<f64>>>,
    pub eta2: Option<Vec<f64>>,
    pub standardizer: Option<Standardizer>,
    pub diagnostics: ChainDiagnostics,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn p0(&self) -> f64 {
        self.config.p0
    }

    pub fn n_coef(&self) -> usize {
        self.beta.first().map_or(0, Vec::len)
    }

    pub fn beta_column(&self, j: usize) -> Vec<f64> {
        self.beta.iter().map(|b| b[j]).collect()
    }

    pub fn beta_mean(&self) -> Vec<f64> {
        (0..self.n_coef())
            .map(|j| self.beta.iter().map(|b| b[j]).sum::<f64>() / self.len() as f64)
            .collect()
    }

    pub fn sigma_mean(&self) -> f64 {
        crate::diagnostics::mean(&self.sigma)
    }

    pub fn gamma_mean(&self) -> f64 {
        crate::diagnostics::mean(&self.gamma)
    }

    /// Column names in CSV order.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.n_coef()).map(|j| format!("beta_{j}")).collect();
        names.push("sigma".into());
        names.push("gamma".into());
        if let Some(om) = &self.omega {
            let d = om.first().map_or(0, Vec::len);
            names.extend((1..=d).map(|k| format!("omega_{k}")));
        }
        if self.eta2.is_some() {
            names.push("eta2".into());
        }
        names
    }

    /// Draws of one named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        match name {
            "sigma" => Some(self.sigma.clone()),
            "gamma" => Some(self.gamma.clone()),
            "eta2" => self.eta2.clone(),
            _ => {
                if let Some(j) = name.strip_prefix("beta_").and_then(|s| s.parse::<usize>().ok()) {
                    (j < self.n_coef()).then(|| self.beta_column(j))
                } else if let Some(k) = name.strip_prefix("omega_").and_then(|s| s.parse::<usize>().ok()) {
                    let om = self.omega.as_ref()?;
                    (k >= 1 && k <= om.first().map_or(0, Vec::len)).then(|| om.iter().map(|w| w[k - 1]).collect())
                } else {
                    None
                }
            }
        }
    }

    /// Row-major table matching [`column_names`](Self::column_names).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|t| {
                let mut row = self.beta[t].clone();
                row.push(self.sigma[t]);
                row.push(self.gamma[t]);
                if let Some(om) = &self.omega {
                    row.extend_from_slice(&om[t]);
                }
                if let Some(e) = &self.eta2 {
                    row.push(e[t]);
                }
                row
            })
            .collect()
    }

    /// Mean, SD, 2.5/50/97.5% quantiles and ESS for `beta`, `sigma`, `gamma`.
    pub fn summary(&self) -> Vec<ParamSummary> {
        let mut out: Vec<ParamSummary> = (0..self.n_coef())
            .map(|j| ParamSummary::from_draws(format!("beta_{j}"), &self.beta_column(j)))
            .collect();
        out.push(ParamSummary::from_draws("sigma", &self.sigma));
        out.push(ParamSummary::from_draws("gamma", &self.gamma));
        if let Some(e) = &self.eta2 {
            out.push(ParamSummary::from_draws("eta2", e));
        }
        out
    }
}

/// Least-squares start for `beta`, falling back to zeros.
fn initial_beta(data: &Dataset) -> DVector<f64> {
    let p = data.p();
    if data.n() >= p {
        if let Ok(b) = data.x.clone().svd(true, true).solve(&data.y, 1e-10) {
            if b.iter().all(|v| v.is_finite()) {
                return b;
            }
        }
    }
    DVector::zeros(p)
}

/// Neutral starting point: least-squares `beta`, `sigma = 1`, `gamma = 0`,
/// `v_i = 1`, `s_i ~ N+(0, 1)`.
pub fn initial_state<R: Rng + ?Sized>(data: &Dataset, p0: f64, rng: &mut R) -> Result<ChainState> {
    let n = data.n();
    Ok(ChainState {
        beta: initial_beta(data),
        sigma: 1.0,
        shape: GalShape::al(p0)?,
        v: vec![1.0; n],
        s: (0..n).map(|_| sample_truncnorm_positive(0.0, 1.0, rng)).collect(),
    })
}

/// Run one chain with the RNG seeded from `config.chain.seed`.
pub fn fit(data: &Dataset, config: &QuantRegConfig) -> Result<PosteriorSamples> {
    let mut rng = stream_rng(config.chain.seed, 0);
    run_chain(data, config, &mut rng)
}

/// Tobit entry point: `data` must carry censoring flags (an all-false set is
/// allowed and reproduces [`run_chain`] exactly).
pub fn run_tobit_chain<R: Rng + ?Sized>(
    data: &Dataset,
    config: &QuantRegConfig,
    rng: &mut R,
) -> Result<PosteriorSamples> {
    if data.censored.len() != data.n() {
        return Err(Error::Data("Tobit fit needs a censoring flag per row".into()));
    }
    run_chain(data, config, rng)
}

/// Gibbs sampler with Metropolis steps for `gamma`. One cycle updates, in
/// order: censored latent responses (if any), `beta`, the shape block, `sigma`
/// and the lasso scales (if configured). With the marginal update the shape
/// block moves `(gamma, sigma)` against the GAL likelihood and then redraws
/// `s` and `v`; otherwise it is a single `gamma` step followed by `v` and `s`.
/// AL fits skip the Metropolis steps.
pub fn run_chain<R: Rng + ?Sized>(data: &Dataset, config: &QuantRegConfig, rng: &mut R) -> Result<PosteriorSamples> {
    config.validate()?;
    let support = GammaSupport::new(config.p0)?;
    let p = data.p();
    let d = p - 1;

    let standardizer = match &config.lasso {
        Some(l) if l.standardize && d > 0 => Some(Standardizer::fit(data)?),
        _ => None,
    };
    let work = match &standardizer {
        Some(st) => st.apply(data),
        None => data.clone(),
    };
    let x = &work.x;
    let mut y = work.y.clone();
    let censored_rows = work.censored_rows();

    let fixed_prior = match &config.lasso {
        None => Some(GaussianPrior::new(
            &config.prior_beta.mean_vector(p)?,
            &config.prior_beta.covariance_matrix(p)?,
        )?),
        Some(_) => None,
    };
    let mut lasso = config.lasso.map(|_| LassoLatents::initial(d));

    let mut state = initial_state(&work, config.p0, rng)?;
    let mut step = GammaStep {
        support,
        prior: config.prior_gamma,
        kind: config.gamma_update,
        step: config.chain.gamma_step,
    };
    let gal = config.model == ErrorModel::Gal;
    let marginal = gal && config.gamma_update == GammaUpdate::Marginal;
    let mut gamma_step = AdaptiveStep::new(config.chain.gamma_step);
    let mut sigma_step = AdaptiveStep::new(config.chain.gamma_step);
    let mut joint_step = AdaptiveStep::new(config.chain.gamma_step);

    let chain = &config.chain;
    let total = chain.total_iterations();
    let mut out = PosteriorSamples {
        config: config.clone(),
        support,
        iterations: Vec::with_capacity(chain.keep),
        beta: Vec::with_capacity(chain.keep),
        sigma: Vec::with_capacity(chain.keep),
        gamma: Vec::with_capacity(chain.keep),
        omega: lasso.as_ref().map(|_| Vec::with_capacity(chain.keep)),
        eta2: lasso.as_ref().map(|_| Vec::with_capacity(chain.keep)),
        standardizer: standardizer.clone(),
        diagnostics: ChainDiagnostics {
            gamma_acceptance: None,
            burn_in_acceptance: None,
            gamma_step: None,
            jitter_events: 0,
            ess: Vec::new(),
            warnings: Vec::new(),
        },
    };
    let (mut acc_burn, mut acc_post) = (0usize, 0usize);

    for t in 0..total {
        if !censored_rows.is_empty() {
            update_w(&state, x, &censored_rows, work.threshold, &mut y, rng);
        }

        let prior = match (&lasso, &config.lasso) {
            (Some(l), Some(cfg)) => l.coefficient_prior(cfg),
            _ => fixed_prior.clone().expect("normal prior present without lasso"),
        };
        let draw = update_beta(&state, x, &y, &prior, rng)
            .map_err(|e| Error::Numerical(format!("iteration {}: {e}", t + 1)))?;
        out.diagnostics.jitter_events += draw.jittered as usize;
        state.beta = draw.beta;

        let target_acc = chain.target_acceptance;
        let burning = t < chain.burn_in;
        if marginal {
            let xb = state.linear_predictor(x);
            let target = ShapeScaleTarget {
                xb: &xb,
                y: &y,
                support: &support,
                prior_gamma: &config.prior_gamma,
                prior_sigma: &config.prior_sigma,
            };
            let mut lt = target.log_density(&state.shape, state.sigma);
            for (kind, adapt) in [
                (ShapeScaleKind::Gamma, &mut gamma_step),
                (ShapeScaleKind::Sigma, &mut sigma_step),
                (ShapeScaleKind::Joint, &mut joint_step),
            ] {
                let mv = shape_scale_move(kind, &target, state.shape, state.sigma, lt, adapt.step(), rng);
                state.shape = mv.shape;
                state.sigma = mv.sigma;
                lt = mv.log_density;
                if burning {
                    adapt.adapt(t, mv.accept_prob, target_acc);
                }
                if kind == ShapeScaleKind::Gamma {
                    *if burning { &mut acc_burn } else { &mut acc_post } += mv.accepted as usize;
                }
            }
            state.s = update_s_marginal(&xb, &y, &state.shape, state.sigma, rng);
            state.v = update_v(&state, x, &y, rng);
        } else {
            if gal {
                step.step = gamma_step.step();
                let mv = update_gamma(&state, x, &y, &step, rng);
                state.shape = mv.shape;
                if burning {
                    gamma_step.adapt(t, mv.accept_prob, target_acc);
                }
                *if burning { &mut acc_burn } else { &mut acc_post } += mv.accepted as usize;
            }
            state.v = update_v(&state, x, &y, rng);
            state.s = update_s(&state, x, &y, rng);
        }
        state.sigma = update_sigma(&state, x, &y, &config.prior_sigma, rng)
            .map_err(|e| Error::Numerical(format!("iteration {}: {e}", t + 1)))?;

        if let (Some(l), Some(cfg)) = (lasso.as_mut(), config.lasso.as_ref()) {
            l.omega = update_omega(&state.beta.as_slice()[1..], l.eta2, rng);
            l.eta2 = update_eta2(&l.omega, cfg, rng);
        }

        if t >= chain.burn_in && (t + 1 - chain.burn_in) % chain.thin == 0 {
            out.iterations.push(t + 1);
            let b = state.beta.as_slice();
            out.beta.push(match &standardizer {
                Some(st) => st.back_transform(b),
                None => b.to_vec(),
            });
            out.sigma.push(state.sigma);
            out.gamma.push(state.shape.gamma);
            if let Some(l) = &lasso {
                out.omega.as_mut().expect("lasso output").push(l.omega.clone());
                out.eta2.as_mut().expect("lasso output").push(l.eta2);
            }
        }
    }

    let diag = &mut out.diagnostics;
    if gal {
        let post = acc_post as f64 / (chain.thin * chain.keep) as f64;
        diag.gamma_acceptance = Some(post);
        diag.burn_in_acceptance = Some(acc_burn as f64 / chain.burn_in as f64);
        diag.gamma_step = Some(gamma_step.step());
        if acc_post == 0 {
            diag.warnings
                .push("no gamma proposal was accepted after burn-in".into());
        }
    }
    if diag.jitter_events > 0 {
        diag.warnings.push(format!(
            "coefficient precision needed diagonal jitter in {} iterations",
            diag.jitter_events
        ));
    }
    let mut ess: Vec<ParamEss> = (0..p)
        .map(|j| ParamEss {
            name: format!("beta_{j}"),
            ess: effective_sample_size(&out.beta.iter().map(|b| b[j]).collect::<Vec<_>>()),
        })
        .collect();
    ess.push(ParamEss {
        name: "sigma".into(),
        ess: effective_sample_size(&out.sigma),
    });
    if gal {
        ess.push(ParamEss {
            name: "gamma".into(),
            ess: effective_sample_size(&out.gamma),
        });
    }
    out.diagnostics.ess = ess;
    Ok(out)
}
