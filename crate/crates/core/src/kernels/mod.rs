//! Random-variate generators and density kernels for the non-GAL
//! distributions the samplers and the simulation study rely on.
//!
//! Every sampler takes the caller's RNG by mutable reference; nothing here
//! touches global state.

mod gig;
mod gpd;
mod normal;
mod skew_normal;
mod truncnorm;

pub use gig::{gig_logdensity, sample_gig, GigParams};
pub use gpd::{gpd_log_cdf, gpd_log_logpdf, gpd_log_pdf, gpd_log_quantile, sample_gpd_log, GpdParams};
pub use normal::{normal_cdf, normal_logcdf, normal_logpdf, normal_pdf};
pub use skew_normal::{skew_normal_logpdf, skew_normal_pdf};
pub use truncnorm::{
    sample_truncnorm_above, sample_truncnorm_below, sample_truncnorm_interval, sample_truncnorm_negative,
    sample_truncnorm_positive,
};

use rand::Rng;
use rand_distr::{Distribution, Exp1, InverseGaussian};

/// Exponential variate with the given mean.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    mean * e
}

/// Inverse-Gaussian variate with the given mean and shape.
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    InverseGaussian::new(mean, shape)
        .expect("inverse-Gaussian mean and shape must be positive")
        .sample(rng)
}
