//! Bayesian quantile regression with generalized asymmetric Laplace (GAL)
//! errors.
//!
//! - [`gal`]: the GAL distribution in raw and quantile-fixed form.
//! - [`kernels`]: generators and densities for the supporting distributions.
//! - [`sampler`]: the Gibbs/Metropolis sampler, with lasso and Tobit variants.
//! - [`assess`]: model-comparison and predictive-accuracy criteria.
//! - [`sim`]: the simulation-study harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assess;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod gal;
pub mod kernels;
pub mod rng;
pub mod sampler;
pub mod sim;
pub mod special;

pub use data::{Dataset, Standardizer};
pub use error::{Error, Result};
pub use gal::{GalParams, GalRawParams, GalShape, GammaSupport};
pub use sampler::{ChainState, ErrorModel, PosteriorSamples, QuantRegConfig};
