use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{GalLatents, GalParams, GalRawParams};
use crate::kernels::sample_truncnorm_positive;
use crate::special::{log_add_exp, log_diff_phi, std_normal_cdf, std_normal_logcdf};

/// Shapes with `|gamma|` below this are evaluated through the asymmetric
/// Laplace limit.
pub const AL_LIMIT: f64 = 1e-8;

/// Check loss `u (p - I(u < 0))`.
#[inline]
pub(crate) fn rho(u: f64, p: f64) -> f64 {
    if u < 0.0 {
        u * (p - 1.0)
    } else {
        u * p
    }
}

/// Asymmetric Laplace log density `ln[p(1-p)/sigma] - rho_p((y - mu)/sigma)`.
pub fn al_logpdf(y: f64, p: f64, mu: f64, sigma: f64) -> f64 {
    (p * (1.0 - p) / sigma).ln() - rho((y - mu) / sigma, p)
}

/// Log density of the standardized raw GAL (`mu = 0`, `sigma = 1`).
///
/// Two terms, each `Phi(.) exp(.)`, combined on the log scale:
///
/// ```text
/// f(y) = 2 p (1-p) { [Phi(y/a - p- a) - Phi(-p- a)] exp(-p- y + (p- a)^2/2) I(y/a > 0)
///                  + Phi(p+ a - (y/a) I(y/a > 0)) exp(-p+ y + (p+ a)^2/2) }
/// ```
/// with `p+ = p - I(a > 0)`, `p- = p - I(a < 0)`.
pub fn std_logpdf_raw(y: f64, p: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return (p * (1.0 - p)).ln() - rho(y, p);
    }
    let p_plus = p - if alpha > 0.0 { 1.0 } else { 0.0 };
    let p_minus = p - if alpha < 0.0 { 1.0 } else { 0.0 };
    let t = y / alpha;
    let inside = t > 0.0;
    let second =
        std_normal_logcdf(p_plus * alpha - if inside { t } else { 0.0 }) - p_plus * y + 0.5 * (p_plus * alpha).powi(2);
    let first = if inside {
        let shift = p_minus * alpha;
        log_diff_phi(-shift, t - shift) - p_minus * y + 0.5 * shift * shift
    } else {
        f64::NEG_INFINITY
    };
    std::f64::consts::LN_2 + (p * (1.0 - p)).ln() + log_add_exp(first, second)
}

pub fn gal_logpdf_raw(y: f64, params: &GalRawParams) -> f64 {
    std_logpdf_raw((y - params.mu) / params.sigma, params.p, params.alpha) - params.sigma.ln()
}

/// Quantile-fixed GAL log density.
pub fn gal_logpdf(y: f64, params: &GalParams) -> f64 {
    let shape = &params.shape;
    let z = (y - params.mu) / params.sigma;
    let std = if shape.gamma.abs() < AL_LIMIT {
        (shape.p * (1.0 - shape.p)).ln() - rho(z, shape.p)
    } else {
        std_logpdf_raw(z, shape.p, shape.alpha)
    };
    std - params.sigma.ln()
}

pub fn gal_pdf(y: f64, params: &GalParams) -> f64 {
    gal_logpdf(y, params).exp()
}

/// CDF of the standardized raw GAL at `y <= 0`.
///
/// Obtained by integrating the asymmetric Laplace CDF
/// (`p e^{(1-p)u}` below zero, `1 - (1-p) e^{-pu}` above) against the
/// half-normal mixing density in `s`; every piece is a Gaussian integral of an
/// exponential and so has a closed form in `Phi`.
fn std_lower_cdf(y: f64, p: f64, alpha: f64) -> f64 {
    debug_assert!(y <= 0.0);
    let ln2 = std::f64::consts::LN_2;
    if alpha == 0.0 {
        return p * ((1.0 - p) * y).exp();
    }
    if alpha > 0.0 {
        let gamma = (1.0 - p) * alpha;
        return (ln2 + p.ln() + (1.0 - p) * y + 0.5 * gamma * gamma + std_normal_logcdf(-gamma)).exp();
    }
    // alpha < 0: the AL argument y - alpha s crosses zero at s = t >= 0
    let t = y / alpha;
    let k = (1.0 - p) * alpha;
    let gamma = p * alpha;
    let below = (ln2 + p.ln() + (1.0 - p) * y + 0.5 * k * k + log_diff_phi(k, t + k)).exp();
    let above_mass = 2.0 * std_normal_cdf(-t);
    let above_tail = (ln2 + (1.0 - p).ln() - p * y + 0.5 * gamma * gamma + std_normal_logcdf(gamma - t)).exp();
    below + above_mass - above_tail
}

/// CDF of the standardized raw GAL. The upper half uses the reflection
/// `-Y ~ GAL(1 - p, -alpha)` so both tails are computed as small lower-tail
/// probabilities.
pub fn std_cdf_raw(y: f64, p: f64, alpha: f64) -> f64 {
    let v = if y <= 0.0 {
        std_lower_cdf(y, p, alpha)
    } else {
        1.0 - std_lower_cdf(-y, 1.0 - p, -alpha)
    };
    v.clamp(0.0, 1.0)
}

/// Quantile-fixed GAL CDF, closed form.
pub fn gal_cdf(y: f64, params: &GalParams) -> f64 {
    let shape = &params.shape;
    let alpha = if shape.gamma.abs() < AL_LIMIT { 0.0 } else { shape.alpha };
    std_cdf_raw((y - params.mu) / params.sigma, shape.p, alpha)
}

/// Draw from the hierarchical mixture, also returning the latents.
pub fn gal_sample_latents<R: Rng + ?Sized>(params: &GalParams, rng: &mut R) -> (f64, GalLatents) {
    let shape = &params.shape;
    let z: f64 = Exp1.sample(rng);
    let s = sample_truncnorm_positive(0.0, 1.0, rng);
    let eps: f64 = StandardNormal.sample(rng);
    let sigma = params.sigma;
    let y = params.mu + sigma * shape.alpha * s + sigma * shape.a * z + sigma * (shape.b * z).sqrt() * eps;
    (y, GalLatents { z, s })
}

/// `mu + sigma alpha s + sigma A z + sigma sqrt(B z) eps`.
pub fn gal_sample<R: Rng + ?Sized>(params: &GalParams, rng: &mut R) -> f64 {
    gal_sample_latents(params, rng).0
}
