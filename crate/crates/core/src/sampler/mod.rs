//! Linear quantile regression with GAL errors: Gibbs updates, the Metropolis
//! step for the shape, lasso and Tobit variants, and posterior predictive
//! machinery.

mod chain;
mod config;
mod io;
pub mod lasso;
pub mod marginal;
mod predictive;
pub mod tobit;
pub mod updates;

pub use chain::{fit, initial_state, run_chain, run_tobit_chain, ChainDiagnostics, ParamEss, PosteriorSamples};
pub use config::{
    ChainConfig, ErrorModel, GammaUpdate, InverseGammaPrior, LassoPriorConfig, NormalPrior, QuantRegConfig,
    RescaledBetaPrior,
};
pub use io::{SampleMetadata, FORMAT_VERSION};
pub use lasso::{standardized_effects, update_eta2, update_omega, LassoLatents};
pub use marginal::{gal_log_likelihood, sample_s_marginal, update_s_marginal, ShapeScaleKind, ShapeScaleTarget};
pub use predictive::{
    censor_replicates, default_grid, posterior_predictive_replicates, predictive_error_density, GRID_HALF_WIDTH,
    GRID_POINTS,
};
pub use tobit::update_w;
pub use updates::{
    beta_conditional, update_beta, update_gamma, update_s, update_sigma, update_v, BetaDraw, ChainState, GammaMove,
    GammaStep, GaussianPrior,
};
