//! Hierarchical Laplace (Bayesian lasso) prior on the slopes.
//!
//! `beta_k | omega_k ~ N(0, omega_k)`, `omega_k | eta2 ~ Exp(rate eta2 / 2)`,
//! `eta2 ~ Gamma(a_eta, rate b_eta)`; the intercept keeps a normal prior.
//! Integrating `omega_k` leaves `beta_k ~ Laplace(0, 1 / eta)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::config::LassoPriorConfig;
use super::updates::GaussianPrior;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{sample_gig, sample_inverse_gaussian, GigParams};

/// Below this magnitude a slope is treated as exactly zero in the `omega`
/// update.
pub const ZERO_SLOPE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoLatents {
    pub omega: Vec<f64>,
    pub eta2: f64,
}

impl LassoLatents {
    pub fn initial(d: usize) -> Self {
        Self {
            omega: vec![1.0; d],
            eta2: 1.0,
        }
    }

    /// Prior on `(beta_0, slopes)` given the current scales.
    pub fn coefficient_prior(&self, cfg: &LassoPriorConfig) -> GaussianPrior {
        let p = self.omega.len() + 1;
        let mut prec = DVector::zeros(p);
        prec[0] = 1.0 / cfg.intercept_variance;
        for (k, w) in self.omega.iter().enumerate() {
            prec[k + 1] = 1.0 / w;
        }
        let mut precision_mean = DVector::zeros(p);
        precision_mean[0] = cfg.intercept_mean * prec[0];
        GaussianPrior {
            precision: DMatrix::from_diagonal(&prec),
            precision_mean,
        }
    }
}

/// Draw each `omega_k` from `GIG(1/2, beta_k^2, eta2)`, i.e.
/// `1 / omega_k ~ InverseGaussian(mean sqrt(eta2 / beta_k^2), shape eta2)`.
/// A zero slope gives the limiting `Gamma(1/2, rate eta2 / 2)`.
pub fn update_omega<R: Rng + ?Sized>(slopes: &[f64], eta2: f64, rng: &mut R) -> Vec<f64> {
    slopes
        .iter()
        .map(|&b| {
            if b.abs() < ZERO_SLOPE {
                let params = GigParams::new(0.5, 0.0, eta2).expect("eta2 > 0");
                sample_gig(&params, rng)
            } else {
                let mean = (eta2 / (b * b)).sqrt();
                1.0 / sample_inverse_gaussian(mean, eta2, rng)
            }
        })
        .collect()
}

/// `eta2 ~ Gamma(a_eta + d, rate b_eta + sum omega_k / 2)`.
pub fn update_eta2<R: Rng + ?Sized>(omega: &[f64], cfg: &LassoPriorConfig, rng: &mut R) -> f64 {
    let shape = cfg.a_eta + omega.len() as f64;
    let rate = cfg.b_eta + 0.5 * omega.iter().sum::<f64>();
    Gamma::new(shape, 1.0 / rate)
        .expect("gamma shape and rate are positive")
        .sample(rng)
}

/// Standardized effects `beta_j* = (s_xj / s_y) beta_j` for each draw of the
/// slopes. `beta_draws` rows include the intercept in column 0.
pub fn standardized_effects(beta_draws: &[Vec<f64>], data: &Dataset) -> Result<Vec<Vec<f64>>> {
    let sy = data.response_sd();
    if !(sy > 0.0) {
        return Err(Error::Domain("response has zero standard deviation".into()));
    }
    let mut ratios = Vec::with_capacity(data.p() - 1);
    for j in 1..data.p() {
        let sx = data.covariate_sd(j);
        if !(sx > 0.0) {
            return Err(Error::Domain(format!(
                "covariate column {j} has zero standard deviation"
            )));
        }
        ratios.push(sx / sy);
    }
    Ok(beta_draws
        .iter()
        .map(|b| b[1..].iter().zip(&ratios).map(|(bj, r)| bj * r).collect())
        .collect())
}
