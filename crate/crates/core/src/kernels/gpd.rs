//! Log-transformed generalized Pareto distribution: `eps = ln X` with
//! `P(X > x) = (1 + xi x / sigma)^(-1/xi)`.

use rand::Rng;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdParams {
    pub sigma: f64,
    pub xi: f64,
}

impl GpdParams {
    pub fn new(sigma: f64, xi: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !(xi > 0.0 && xi.is_finite()) {
            return domain(format!("GPD needs sigma > 0 and xi > 0, got ({sigma}, {xi})"));
        }
        Ok(Self { sigma, xi })
    }
}

/// `ln f(eps) = -ln sigma - (1 + 1/xi) ln(1 + xi e^eps / sigma) + eps`
pub fn gpd_log_logpdf(eps: f64, params: &GpdParams) -> f64 {
    let GpdParams { sigma, xi } = *params;
    -sigma.ln() - (1.0 + 1.0 / xi) * (xi * eps.exp() / sigma).ln_1p() + eps
}

pub fn gpd_log_pdf(eps: f64, params: &GpdParams) -> f64 {
    gpd_log_logpdf(eps, params).exp()
}

pub fn gpd_log_cdf(eps: f64, params: &GpdParams) -> f64 {
    let GpdParams { sigma, xi } = *params;
    // 1 - (1 + xi e^eps / sigma)^(-1/xi)
    -(-(xi * eps.exp() / sigma).ln_1p() / xi).exp_m1()
}

/// `ln(sigma / xi ((1 - p)^(-xi) - 1))`
pub fn gpd_log_quantile(p: f64, params: &GpdParams) -> f64 {
    let GpdParams { sigma, xi } = *params;
    (sigma / xi * (-xi * (-p).ln_1p()).exp_m1()).ln()
}

/// Inverse-CDF draw of a generalized Pareto variate, then its logarithm.
pub fn sample_gpd_log<R: Rng + ?Sized>(params: &GpdParams, rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return gpd_log_quantile(u, params);
        }
    }
}
