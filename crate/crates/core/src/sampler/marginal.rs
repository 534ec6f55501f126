//! Block update of `(gamma, sigma, s, v)` given `beta`.
//!
//! `(gamma, sigma)` move by Metropolis-Hastings against the GAL likelihood
//! with both latents integrated out. The latents are then drawn from their
//! joint conditional: `s_i` with `v_i` integrated (a two-piece truncated
//! normal), followed by `v_i` from its GIG conditional.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{InverseGammaPrior, RescaledBetaPrior};
use super::updates::std_scale;
use crate::gal::{std_logpdf_raw, GalShape, GammaSupport, AL_LIMIT};
use crate::kernels::{sample_truncnorm_interval, sample_truncnorm_positive};
use crate::special::{log_add_exp, log_diff_phi};

fn effective_alpha(shape: &GalShape) -> f64 {
    if shape.gamma.abs() < AL_LIMIT {
        0.0
    } else {
        shape.alpha
    }
}

/// `sum_i ln f(y_i | x_i'beta, sigma, gamma)` for the GAL density.
pub fn gal_log_likelihood(xb: &DVector<f64>, y: &DVector<f64>, shape: &GalShape, sigma: f64) -> f64 {
    let alpha = effective_alpha(shape);
    let mut ll = -(y.len() as f64) * sigma.ln();
    for i in 0..y.len() {
        ll += std_logpdf_raw((y[i] - xb[i]) / sigma, shape.p, alpha);
    }
    ll
}

/// Log posterior of `(gamma, sigma)` given `beta`, up to a constant.
#[derive(Debug, Clone, Copy)]
pub struct ShapeScaleTarget<'a> {
    pub xb: &'a DVector<f64>,
    pub y: &'a DVector<f64>,
    pub support: &'a GammaSupport,
    pub prior_gamma: &'a RescaledBetaPrior,
    pub prior_sigma: &'a InverseGammaPrior,
}

impl ShapeScaleTarget<'_> {
    pub fn log_density(&self, shape: &GalShape, sigma: f64) -> f64 {
        let u = self.support.to_unit(shape.gamma);
        if !(u > 0.0 && u < 1.0 && sigma > 0.0 && sigma.is_finite()) {
            return f64::NEG_INFINITY;
        }
        self.prior_gamma.log_density_unit(u)
            - (self.prior_sigma.shape + 1.0) * sigma.ln()
            - self.prior_sigma.scale / sigma
            + gal_log_likelihood(self.xb, self.y, shape, sigma)
    }
}

/// Proposal families for the `(gamma, sigma)` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeScaleKind {
    /// Random walk on `logit((gamma - L) / (U - L))`, `sigma` fixed.
    Gamma,
    /// Random walk on `ln sigma`, `gamma` fixed.
    Sigma,
    /// `gamma` walk as above with `sigma` rescaled so that
    /// `sigma * std_scale(gamma)` is unchanged.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeScaleMove {
    pub shape: GalShape,
    pub sigma: f64,
    /// Log target at the returned point.
    pub log_density: f64,
    pub accepted: bool,
    pub accept_prob: f64,
}

fn logit_walk<R: Rng + ?Sized>(support: &GammaSupport, gamma: f64, step: f64, rng: &mut R) -> Option<(GalShape, f64)> {
    let u = support.to_unit(gamma);
    let eta = (u / (1.0 - u)).ln();
    let z: f64 = rng.sample(StandardNormal);
    let u_new = 1.0 / (1.0 + (-(eta + step * z)).exp());
    if !(u_new > 0.0 && u_new < 1.0) {
        return None;
    }
    let shape = GalShape::new(support.from_unit(u_new), support).ok()?;
    Some((shape, (u_new * (1.0 - u_new)).ln() - (u * (1.0 - u)).ln()))
}

/// One Metropolis-Hastings move of the given kind from `(shape, sigma)`,
/// whose log target is `current`.
pub fn shape_scale_move<R: Rng + ?Sized>(
    kind: ShapeScaleKind,
    target: &ShapeScaleTarget<'_>,
    shape: GalShape,
    sigma: f64,
    current: f64,
    step: f64,
    rng: &mut R,
) -> ShapeScaleMove {
    let stay = ShapeScaleMove {
        shape,
        sigma,
        log_density: current,
        accepted: false,
        accept_prob: 0.0,
    };
    let proposal = match kind {
        ShapeScaleKind::Gamma => logit_walk(target.support, shape.gamma, step, rng).map(|(s, j)| (s, sigma, j)),
        ShapeScaleKind::Sigma => {
            let z: f64 = rng.sample(StandardNormal);
            let sigma_new = sigma * (step * z).exp();
            Some((shape, sigma_new, (sigma_new / sigma).ln()))
        }
        ShapeScaleKind::Joint => logit_walk(target.support, shape.gamma, step, rng).map(|(s, j)| {
            let ratio = std_scale(&shape) / std_scale(&s);
            (s, sigma * ratio, j + ratio.ln())
        }),
    };
    let Some((shape_new, sigma_new, log_jacobian)) = proposal else {
        return stay;
    };
    let proposed = target.log_density(&shape_new, sigma_new);
    if !proposed.is_finite() {
        return stay;
    }
    let log_ratio = proposed - current + log_jacobian;
    let accept_prob = if log_ratio >= 0.0 { 1.0 } else { log_ratio.exp() };
    if rng.random::<f64>() < accept_prob {
        ShapeScaleMove {
            shape: shape_new,
            sigma: sigma_new,
            log_density: proposed,
            accepted: true,
            accept_prob,
        }
    } else {
        ShapeScaleMove { accept_prob, ..stay }
    }
}

/// Draw `s ~ N+(0, 1)` weighted by `exp(-rho_p(r - alpha s))`, the conditional
/// of the half-normal latent given the standardized residual `r` once `v` is
/// integrated out. On each side of the kink `s = r / alpha` the density is a
/// unit-variance normal piece.
pub fn sample_s_marginal<R: Rng + ?Sized>(r: f64, p: f64, alpha: f64, rng: &mut R) -> f64 {
    if alpha == 0.0 {
        return sample_truncnorm_positive(0.0, 1.0, rng);
    }
    let kink = (r / alpha).max(0.0);
    // residual positive: -p (r - alpha s); negative: (1 - p)(r - alpha s)
    let m_pos = p * alpha;
    let m_neg = (p - 1.0) * alpha;
    let (pos, neg) = if alpha > 0.0 {
        ((0.0, kink), (kink, f64::INFINITY))
    } else {
        ((kink, f64::INFINITY), (0.0, kink))
    };
    let w_pos = 0.5 * m_pos * m_pos - p * r + log_diff_phi(pos.0 - m_pos, pos.1 - m_pos);
    let w_neg = 0.5 * m_neg * m_neg - (p - 1.0) * r + log_diff_phi(neg.0 - m_neg, neg.1 - m_neg);
    let prob_pos = (w_pos - log_add_exp(w_pos, w_neg)).exp();
    if rng.random::<f64>() < prob_pos {
        sample_truncnorm_interval(m_pos, 1.0, pos.0, pos.1, rng)
    } else {
        sample_truncnorm_interval(m_neg, 1.0, neg.0, neg.1, rng)
    }
}

/// Redraw every `s_i` from its `v`-integrated conditional.
pub fn update_s_marginal<R: Rng + ?Sized>(
    xb: &DVector<f64>,
    y: &DVector<f64>,
    shape: &GalShape,
    sigma: f64,
    rng: &mut R,
) -> Vec<f64> {
    let alpha = effective_alpha(shape);
    (0..y.len())
        .map(|i| sample_s_marginal((y[i] - xb[i]) / sigma, shape.p, alpha, rng))
        .collect()
}
