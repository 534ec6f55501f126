//! Full-conditional updates of the augmented GAL regression posterior.
//!
//! With `v_i = sigma z_i` and `alpha = C |gamma|` the hierarchy is
//!
//! ```text
//! y_i | beta, gamma, sigma, v_i, s_i ~ N(x_i'beta + sigma alpha s_i + A v_i, sigma B v_i)
//! v_i ~ Exp(mean sigma),  s_i ~ N+(0, 1)
//! ```
//!
//! Every function takes the (possibly augmented) response vector explicitly
//! so the Tobit sampler can pass imputed values for censored rows.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{GammaUpdate, InverseGammaPrior, RescaledBetaPrior};
use crate::error::{Error, Result};
use crate::gal::{rho, GalShape, GammaSupport};
use crate::kernels::{sample_gig, sample_truncnorm_positive, GigParams};

/// Current values of every unknown in the augmented posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: DVector<f64>,
    pub sigma: f64,
    pub shape: GalShape,
    /// `v_i = sigma z_i`, one per row.
    pub v: Vec<f64>,
    /// Half-normal latents, one per row.
    pub s: Vec<f64>,
}

impl ChainState {
    pub fn gamma(&self) -> f64 {
        self.shape.gamma
    }

    pub fn linear_predictor(&self, x: &DMatrix<f64>) -> DVector<f64> {
        x * &self.beta
    }
}

/// Gaussian prior in information form: precision `Q0` and `Q0 m0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPrior {
    pub precision: DMatrix<f64>,
    pub precision_mean: DVector<f64>,
}

impl GaussianPrior {
    pub fn new(mean: &DVector<f64>, covariance: &DMatrix<f64>) -> Result<Self> {
        let chol = covariance
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Config("prior covariance is not symmetric positive-definite".into()))?;
        let precision = chol.inverse();
        let precision_mean = &precision * mean;
        Ok(Self {
            precision,
            precision_mean,
        })
    }

    /// Independent normals with the given means and variances.
    pub fn diagonal(mean: &[f64], variance: &[f64]) -> Self {
        let prec: Vec<f64> = variance.iter().map(|v| 1.0 / v).collect();
        Self {
            precision: DMatrix::from_diagonal(&DVector::from_column_slice(&prec)),
            precision_mean: DVector::from_iterator(mean.len(), mean.iter().zip(&prec).map(|(m, q)| m * q)),
        }
    }
}

/// Outcome of a coefficient draw.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaDraw {
    pub beta: DVector<f64>,
    /// Set when the posterior precision needed diagonal jitter to factor.
    pub jittered: bool,
}

/// Relative diagonal jitter applied when the posterior precision does not
/// factor.
pub const JITTER: f64 = 1e-10;

/// Information form `(Q*, r*)` of the coefficient conditional, with
/// `Q* = Q0 + sum x_i x_i' / (B sigma v_i)` and
/// `r* = Q0 m0 + sum x_i (y_i - sigma alpha s_i - A v_i) / (B sigma v_i)`;
/// the conditional is `N(Q*^-1 r*, Q*^-1)`.
pub fn beta_conditional(
    state: &ChainState,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    prior: &GaussianPrior,
) -> (DMatrix<f64>, DVector<f64>) {
    let (n, p) = x.shape();
    let sh = &state.shape;
    let sigma = state.sigma;
    let mut q = prior.precision.clone();
    let mut rhs = prior.precision_mean.clone();
    let mut xw = x.clone();
    for i in 0..n {
        let w = 1.0 / (sh.b * sigma * state.v[i]);
        let resid = y[i] - sigma * sh.alpha * state.s[i] - sh.a * state.v[i];
        for j in 0..p {
            rhs[j] += x[(i, j)] * w * resid;
            xw[(i, j)] *= w;
        }
    }
    q.gemm_tr(1.0, x, &xw, 1.0);
    (q, rhs)
}

/// Draw `beta` from the conditional of [`beta_conditional`].
pub fn update_beta<R: Rng + ?Sized>(
    state: &ChainState,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    prior: &GaussianPrior,
    rng: &mut R,
) -> Result<BetaDraw> {
    let (q, rhs) = beta_conditional(state, x, y, prior);
    draw_from_information(q, rhs, rng)
}

/// Draw from `N(Q^-1 r, Q^-1)` through a Cholesky factor of `Q`, retrying
/// once with diagonal jitter.
pub fn draw_from_information<R: Rng + ?Sized>(q: DMatrix<f64>, r: DVector<f64>, rng: &mut R) -> Result<BetaDraw> {
    let p = q.nrows();
    let (chol, jittered) = match q.clone().cholesky() {
        Some(c) => (c, false),
        None => {
            let scale = q.diagonal().amax().max(1.0);
            let mut qj = q.clone();
            for j in 0..p {
                qj[(j, j)] += JITTER * scale;
            }
            let c = qj.cholesky().ok_or_else(|| {
                Error::Numerical(format!(
                    "coefficient precision is not positive-definite even with jitter \
                     (diagonal min {:.3e}, max {:.3e})",
                    q.diagonal().min(),
                    q.diagonal().max()
                ))
            })?;
            (c, true)
        }
    };
    let mean = chol.solve(&r);
    let z = DVector::from_iterator(p, (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
    // L L' = Q, so L'^-1 z has covariance Q^-1
    let dev = chol
        .l()
        .tr_solve_lower_triangular(&z)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let beta = mean + dev;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Numerical("non-finite coefficient draw".into()));
    }
    Ok(BetaDraw { beta, jittered })
}

/// GIG parameters of the `v_i` conditional:
/// `a_i = (y_i - x_i'beta - sigma alpha s_i)^2 / (B sigma)`,
/// `b = 2 / sigma + A^2 / (B sigma)`, order 1/2.
pub fn v_conditional(state: &ChainState, resid: f64, s: f64) -> (f64, f64) {
    let sh = &state.shape;
    let sigma = state.sigma;
    let e = resid - sigma * sh.alpha * s;
    let a = e * e / (sh.b * sigma);
    let b = 2.0 / sigma + sh.a * sh.a / (sh.b * sigma);
    (a, b)
}

pub fn update_v<R: Rng + ?Sized>(state: &ChainState, x: &DMatrix<f64>, y: &DVector<f64>, rng: &mut R) -> Vec<f64> {
    let xb = state.linear_predictor(x);
    (0..y.len())
        .map(|i| {
            let (a, b) = v_conditional(state, y[i] - xb[i], state.s[i]);
            let params = GigParams::new(0.5, a, b).expect("v conditional has b > 0");
            sample_gig(&params, rng)
        })
        .collect()
}

/// Mean and variance of the untruncated normal in the `s_i` conditional:
/// variance `[alpha^2 sigma / (B v_i) + 1]^-1`,
/// mean `variance * alpha (y_i - x_i'beta - A v_i) / (B v_i)`.
pub fn s_conditional(state: &ChainState, resid: f64, v: f64) -> (f64, f64) {
    let sh = &state.shape;
    let bv = sh.b * v;
    let var = 1.0 / (sh.alpha * sh.alpha * state.sigma / bv + 1.0);
    let mean = var * sh.alpha * (resid - sh.a * v) / bv;
    (mean, var)
}

pub fn update_s<R: Rng + ?Sized>(state: &ChainState, x: &DMatrix<f64>, y: &DVector<f64>, rng: &mut R) -> Vec<f64> {
    let xb = state.linear_predictor(x);
    (0..y.len())
        .map(|i| {
            let (mean, var) = s_conditional(state, y[i] - xb[i], state.v[i]);
            sample_truncnorm_positive(mean, var, rng)
        })
        .collect()
}

/// GIG parameters `(nu, c, d)` of the `sigma` conditional:
/// `nu = -(a_sigma + 1.5 n)`,
/// `c = 2 b_sigma + 2 sum v_i + sum (y_i - x_i'beta - A v_i)^2 / (B v_i)`,
/// `d = sum (alpha s_i)^2 / (B v_i)`.
pub fn sigma_conditional(
    state: &ChainState,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    prior: &InverseGammaPrior,
) -> (f64, f64, f64) {
    let sh = &state.shape;
    let xb = state.linear_predictor(x);
    let n = y.len();
    let mut c = 2.0 * prior.scale;
    let mut d = 0.0;
    for i in 0..n {
        let v = state.v[i];
        let r = y[i] - xb[i] - sh.a * v;
        c += 2.0 * v + r * r / (sh.b * v);
        let t = sh.alpha * state.s[i];
        d += t * t / (sh.b * v);
    }
    (-(prior.shape + 1.5 * n as f64), c, d)
}

/// Draw `sigma`; when `d = 0` (the AL case) the GIG is an inverse gamma and
/// the GIG sampler takes its `b = 0` branch.
pub fn update_sigma<R: Rng + ?Sized>(
    state: &ChainState,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    prior: &InverseGammaPrior,
    rng: &mut R,
) -> Result<f64> {
    let (nu, c, d) = sigma_conditional(state, x, y, prior);
    let params = GigParams::new(nu, c, d)?;
    let sigma = sample_gig(&params, rng);
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Numerical(format!("sigma draw {sigma} from GIG({nu}, {c}, {d})")));
    }
    Ok(sigma)
}

/// Settings of the `gamma` Metropolis step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaStep {
    pub support: GammaSupport,
    pub prior: RescaledBetaPrior,
    pub kind: GammaUpdate,
    /// Standard deviation of the random walk on `logit((gamma - L)/(U - L))`.
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMove {
    pub shape: GalShape,
    pub accepted: bool,
    /// Metropolis-Hastings acceptance probability of the proposal.
    pub accept_prob: f64,
}

/// Log of the `gamma` target (up to a constant) at `shape`, given the rest
/// of the state. Returns `-inf` outside the support.
pub fn gamma_log_target(
    shape: &GalShape,
    state: &ChainState,
    xb: &DVector<f64>,
    y: &DVector<f64>,
    step: &GammaStep,
) -> f64 {
    let u = step.support.to_unit(shape.gamma);
    if !(u > 0.0 && u < 1.0) {
        return f64::NEG_INFINITY;
    }
    let sigma = state.sigma;
    let mut lt = step.prior.log_density_unit(u);
    match step.kind {
        GammaUpdate::Collapsed => {
            // integrating z_i gives an AL(p) likelihood centred at
            // x_i'beta + sigma alpha s_i
            let n = y.len() as f64;
            lt += n * (shape.p * (1.0 - shape.p)).ln();
            let mut loss = 0.0;
            for i in 0..y.len() {
                loss += rho(y[i] - xb[i] - sigma * shape.alpha * state.s[i], shape.p);
            }
            lt -= loss / sigma;
        }
        GammaUpdate::Marginal => {
            lt += super::marginal::gal_log_likelihood(xb, y, shape, sigma);
        }
        GammaUpdate::Conditional => {
            for i in 0..y.len() {
                let v = state.v[i];
                let e = y[i] - xb[i] - sigma * shape.alpha * state.s[i] - shape.a * v;
                lt -= 0.5 * shape.b.ln() + e * e / (2.0 * sigma * shape.b * v);
            }
        }
    }
    lt
}

/// One random-walk Metropolis-Hastings step on the logit scale of
/// `(gamma - L) / (U - L)`. The proposal density ratio contributes the
/// Jacobian `u'(1 - u') / (u (1 - u))`.
pub fn update_gamma<R: Rng + ?Sized>(
    state: &ChainState,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    step: &GammaStep,
    rng: &mut R,
) -> GammaMove {
    let xb = state.linear_predictor(x);
    let support = &step.support;
    let u = support.to_unit(state.shape.gamma);
    let eta = (u / (1.0 - u)).ln();
    let z: f64 = rng.sample(StandardNormal);
    let eta_new = eta + step.step * z;
    let u_new = 1.0 / (1.0 + (-eta_new).exp());
    let gamma_new = support.from_unit(u_new);
    let stay = GammaMove {
        shape: state.shape,
        accepted: false,
        accept_prob: 0.0,
    };
    let Ok(proposal) = GalShape::new(gamma_new, support) else {
        return stay;
    };
    if !(u_new > 0.0 && u_new < 1.0) {
        return stay;
    }
    let log_ratio = gamma_log_target(&proposal, state, &xb, y, step)
        - gamma_log_target(&state.shape, state, &xb, y, step)
        + (u_new * (1.0 - u_new)).ln()
        - (u * (1.0 - u)).ln();
    let accept_prob = if log_ratio >= 0.0 { 1.0 } else { log_ratio.exp() };
    let accepted = rng.random::<f64>() < accept_prob;
    GammaMove {
        shape: if accepted { proposal } else { state.shape },
        accepted,
        accept_prob,
    }
}

/// Standard deviation of the standardized GAL with this shape:
/// `sqrt(alpha^2 (1 - 2/pi) + A^2 + B)`.
pub fn std_scale(shape: &GalShape) -> f64 {
    (shape.alpha * shape.alpha * (1.0 - 2.0 / std::f64::consts::PI) + shape.a * shape.a + shape.b).sqrt()
}
