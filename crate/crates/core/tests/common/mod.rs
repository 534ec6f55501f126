//! Oracles shared by the integration tests. Outside `audits` and
//! `lasso_checks` nothing here calls the sampler code under test: shape
//! coefficients, the augmented joint density and the reference asymmetric
//! Laplace sampler are written out from the model definition.

#![allow(dead_code)]

pub mod audits;
pub mod lasso_checks;

use galqr_testkit::integrate_with_breaks;
use libm::erfc;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, StandardNormal};

/// `(x, F(x))` pairs of a piecewise-linear CDF.
pub type Knots = Vec<(f64, f64)>;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn phi_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `(p, A, B, alpha)` of the shape `gamma` at quantile `p0`.
#[derive(Debug, Clone, Copy)]
pub struct Coefs {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

pub fn coefs(gamma: f64, p0: f64) -> Coefs {
    let neg = if gamma < 0.0 { 1.0 } else { 0.0 };
    let pos = if gamma > 0.0 { 1.0 } else { 0.0 };
    let g = 2.0 * phi_cdf(-gamma.abs()) * (0.5 * gamma * gamma).exp();
    let p = neg + (p0 - neg) / g;
    let alpha = if gamma == 0.0 { 0.0 } else { gamma.abs() / (pos - p) };
    Coefs {
        p,
        a: (1.0 - 2.0 * p) / (p * (1.0 - p)),
        b: 2.0 / (p * (1.0 - p)),
        alpha,
    }
}

pub fn normal_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln() + (x - mean).powi(2) / var)
}

/// Small regression problem with every unknown of the augmented model fixed.
#[derive(Debug, Clone)]
pub struct Tiny {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub p0: f64,
    pub beta: DVector<f64>,
    pub sigma: f64,
    pub gamma: f64,
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub prior_mean: Vec<f64>,
    pub prior_var: Vec<f64>,
    pub sigma_shape: f64,
    pub sigma_scale: f64,
}

impl Tiny {
    /// Three observations, one covariate and no intercept.
    pub fn new(p0: f64, gamma: f64) -> Self {
        Self {
            x: DMatrix::from_column_slice(3, 1, &[0.5, -1.2, 2.0]),
            y: DVector::from_vec(vec![1.1, -0.4, 2.3]),
            p0,
            beta: DVector::from_vec(vec![0.7]),
            sigma: 0.8,
            gamma,
            s: vec![0.4, 1.3, 0.9],
            v: vec![0.6, 1.5, 0.3],
            prior_mean: vec![0.2],
            prior_var: vec![4.0],
            sigma_shape: 2.0,
            sigma_scale: 2.0,
        }
    }

    /// Log of the joint density of `(y, s, v, beta, sigma)` at fixed `gamma`
    /// under a uniform prior on the shape, up to a constant.
    pub fn log_joint(&self) -> f64 {
        let k = coefs(self.gamma, self.p0);
        let sigma = self.sigma;
        if sigma.is_nan() || sigma <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut lj = 0.0;
        for i in 0..self.y.len() {
            let (s, v) = (self.s[i], self.v[i]);
            if !(s > 0.0 && v > 0.0) {
                return f64::NEG_INFINITY;
            }
            let mean = (self.x.row(i) * &self.beta)[0] + sigma * k.alpha * s + k.a * v;
            lj += normal_logpdf(self.y[i], mean, sigma * k.b * v);
            lj += -0.5 * s * s;
            lj += -sigma.ln() - v / sigma;
        }
        for j in 0..self.beta.len() {
            lj += normal_logpdf(self.beta[j], self.prior_mean[j], self.prior_var[j]);
        }
        lj += -(self.sigma_shape + 1.0) * sigma.ln() - self.sigma_scale / sigma;
        lj
    }

    pub fn xb(&self, i: usize) -> f64 {
        (self.x.row(i) * &self.beta)[0]
    }

    /// `ln ∫ N(y_i; xb + sigma alpha s + A v, sigma B v) Exp(v; mean sigma) dv`
    /// by quadrature.
    pub fn log_v_integrated(&self, i: usize, s: f64) -> f64 {
        let k = coefs(self.gamma, self.p0);
        let sigma = self.sigma;
        let e = self.y[i] - self.xb(i) - sigma * k.alpha * s;
        let f = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            (normal_logpdf(e, k.a * v, sigma * k.b * v) - sigma.ln() - v / sigma).exp()
        };
        integrate_with_breaks(f, &[0.0, sigma, 10.0 * sigma, f64::INFINITY])
            .value
            .ln()
    }

    /// `ln ∫ N+(s) [v-integrated density] ds` by nested quadrature: the GAL
    /// log likelihood of observation `i`.
    pub fn log_sv_integrated(&self, i: usize) -> f64 {
        let k = coefs(self.gamma, self.p0);
        let norm = (2.0 / std::f64::consts::PI).sqrt();
        let f = |s: f64| norm * (-0.5 * s * s + self.log_v_integrated(i, s)).exp();
        let mut breaks = vec![0.0, 8.0, f64::INFINITY];
        if k.alpha != 0.0 {
            let kink = (self.y[i] - self.xb(i)) / (self.sigma * k.alpha);
            if kink > 0.0 && kink < 8.0 {
                breaks.insert(1, kink);
            }
        }
        integrate_with_breaks(f, &breaks).value.ln()
    }
}

/// Closed-form asymmetric Laplace log density with skewness `p`, location
/// `mu` and scale `sigma`.
pub fn al_logpdf(y: f64, p: f64, mu: f64, sigma: f64) -> f64 {
    let u = (y - mu) / sigma;
    let rho = if u < 0.0 { u * (p - 1.0) } else { u * p };
    (p * (1.0 - p) / sigma).ln() - rho
}

/// GAL log density by one-dimensional quadrature over the half-normal latent
/// of the asymmetric Laplace scale mixture.
pub fn gal_logpdf_quadrature(y: f64, gamma: f64, p0: f64, mu: f64, sigma: f64) -> f64 {
    let k = coefs(gamma, p0);
    if k.alpha == 0.0 {
        return al_logpdf(y, k.p, mu, sigma);
    }
    let norm = (2.0 / std::f64::consts::PI).sqrt();
    let f = |s: f64| norm * (-0.5 * s * s + al_logpdf(y, k.p, mu + sigma * k.alpha * s, sigma)).exp();
    let mut breaks = vec![0.0, 9.0, f64::INFINITY];
    let kink = (y - mu) / (sigma * k.alpha);
    if kink > 0.0 && kink < 9.0 {
        breaks.insert(1, kink);
    }
    integrate_with_breaks(f, &breaks).value.ln()
}

/// Inverse-CDF sampler for a density tabulated on a grid.
#[derive(Debug, Clone)]
pub struct GridSampler {
    xs: Vec<f64>,
    cum: Vec<f64>,
}

impl GridSampler {
    pub fn new<F: Fn(f64) -> f64>(log_density: F, lo: f64, hi: f64, n: usize) -> Self {
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let logs: Vec<f64> = xs.iter().map(|&x| log_density(x)).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = logs
            .iter()
            .map(|&l| if l.is_finite() { (l - top).exp() } else { 0.0 })
            .collect();
        let mut cum = vec![0.0; n];
        for i in 1..n {
            cum[i] = cum[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (dens[i] + dens[i - 1]);
        }
        let total = cum[n - 1];
        cum.iter_mut().for_each(|c| *c /= total);
        Self { xs, cum }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&g| g <= x);
        if i >= self.xs.len() {
            return 1.0;
        }
        let t = (x - self.xs[i - 1]) / (self.xs[i] - self.xs[i - 1]);
        self.cum[i - 1] + t * (self.cum[i] - self.cum[i - 1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cum.partition_point(|&c| c < u).clamp(1, self.xs.len() - 1);
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }
}

/// Sampler for a density tabulated on a two-dimensional grid: a cell is
/// chosen by its mass and a point drawn uniformly inside it.
#[derive(Debug, Clone)]
pub struct Grid2Sampler {
    a: (f64, f64, usize),
    b: (f64, f64, usize),
    cum: Vec<f64>,
}

impl Grid2Sampler {
    pub fn new<F: Fn(f64, f64) -> f64>(log_density: F, a: (f64, f64, usize), b: (f64, f64, usize)) -> Self {
        let ha = (a.1 - a.0) / a.2 as f64;
        let hb = (b.1 - b.0) / b.2 as f64;
        let mut logs = Vec::with_capacity(a.2 * b.2);
        for i in 0..a.2 {
            for j in 0..b.2 {
                logs.push(log_density(a.0 + ha * (i as f64 + 0.5), b.0 + hb * (j as f64 + 0.5)));
            }
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut cum = Vec::with_capacity(logs.len());
        let mut acc = 0.0;
        for l in logs {
            acc += if l.is_finite() { (l - top).exp() } else { 0.0 };
            cum.push(acc);
        }
        cum.iter_mut().for_each(|c| *c /= acc);
        Self { a, b, cum }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u: f64 = rng.random();
        let k = self.cum.partition_point(|&c| c < u).min(self.cum.len() - 1);
        let (i, j) = (k / self.b.2, k % self.b.2);
        let ha = (self.a.1 - self.a.0) / self.a.2 as f64;
        let hb = (self.b.1 - self.b.0) / self.b.2 as f64;
        (
            self.a.0 + ha * (i as f64 + rng.random::<f64>()),
            self.b.0 + hb * (j as f64 + rng.random::<f64>()),
        )
    }

    /// Marginal CDFs of the two coordinates on the cell edges.
    pub fn marginal_cdfs(&self) -> (Knots, Knots) {
        let mut ma = vec![0.0; self.a.2];
        let mut mb = vec![0.0; self.b.2];
        let mut prev = 0.0;
        for (k, &c) in self.cum.iter().enumerate() {
            ma[k / self.b.2] += c - prev;
            mb[k % self.b.2] += c - prev;
            prev = c;
        }
        let edges = |(lo, hi, n): (f64, f64, usize), m: Vec<f64>| {
            let h = (hi - lo) / n as f64;
            let mut acc = 0.0;
            let mut out = vec![(lo, 0.0)];
            for (i, w) in m.into_iter().enumerate() {
                acc += w;
                out.push((lo + h * (i + 1) as f64, acc));
            }
            out
        };
        (edges(self.a, ma), edges(self.b, mb))
    }
}

/// Piecewise-linear CDF through `(x, F(x))` knots.
pub fn knot_cdf(knots: &[(f64, f64)], x: f64) -> f64 {
    if x <= knots[0].0 {
        return 0.0;
    }
    let i = knots.partition_point(|k| k.0 <= x);
    if i >= knots.len() {
        return 1.0;
    }
    let (x0, f0) = knots[i - 1];
    let (x1, f1) = knots[i];
    f0 + (x - x0) / (x1 - x0) * (f1 - f0)
}

/// Draws of a reference asymmetric Laplace Gibbs sampler.
#[derive(Debug, Clone)]
pub struct AlDraws {
    pub beta: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
}

/// Gibbs sampler for quantile regression with asymmetric Laplace errors in
/// the exponential-normal mixture form
/// `y_i = x_i'beta + theta v_i + sqrt(tau2 sigma v_i) z_i`, `v_i ~ Exp(mean sigma)`,
/// with `beta ~ N(m0, diag(var0))` and `sigma ~ IG(a0, b0)`. The latent
/// `1 / v_i` is inverse Gaussian.
#[allow(clippy::too_many_arguments)]
pub fn al_reference_chain<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    p0: f64,
    m0: &[f64],
    var0: &[f64],
    a0: f64,
    b0: f64,
    burn_in: usize,
    thin: usize,
    keep: usize,
    rng: &mut R,
) -> AlDraws {
    let (n, p) = x.shape();
    let theta = (1.0 - 2.0 * p0) / (p0 * (1.0 - p0));
    let tau2 = 2.0 / (p0 * (1.0 - p0));
    let mut beta = x.clone().svd(true, true).solve(y, 1e-12).expect("least squares start");
    let mut sigma = 1.0;
    let mut v = vec![1.0; n];
    let mut out = AlDraws {
        beta: Vec::with_capacity(keep),
        sigma: Vec::with_capacity(keep),
    };
    for t in 0..burn_in + thin * keep {
        // latent scales
        for i in 0..n {
            let r = y[i] - (x.row(i) * &beta)[0];
            let chi = (r * r / (tau2 * sigma)).max(1e-300);
            let psi = theta * theta / (tau2 * sigma) + 2.0 / sigma;
            let ig = InverseGaussian::new((psi / chi).sqrt(), psi).expect("valid inverse Gaussian");
            v[i] = 1.0 / ig.sample(rng);
        }
        // coefficients
        let mut q = DMatrix::<f64>::zeros(p, p);
        let mut rhs = DVector::<f64>::zeros(p);
        for j in 0..p {
            q[(j, j)] = 1.0 / var0[j];
            rhs[j] = m0[j] / var0[j];
        }
        for i in 0..n {
            let w = 1.0 / (tau2 * sigma * v[i]);
            let xi = x.row(i).transpose();
            q += &xi * xi.transpose() * w;
            rhs += &xi * (w * (y[i] - theta * v[i]));
        }
        let chol = q.cholesky().expect("positive-definite precision");
        let mean = chol.solve(&rhs);
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dev = chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("triangular solve");
        beta = mean + dev;
        // scale: inverse gamma
        let mut rate = b0;
        for i in 0..n {
            let r = y[i] - (x.row(i) * &beta)[0] - theta * v[i];
            rate += v[i] + r * r / (2.0 * tau2 * v[i]);
        }
        let shape = a0 + 1.5 * n as f64;
        sigma = 1.0 / Gamma::new(shape, 1.0 / rate).expect("valid gamma").sample(rng);
        if t >= burn_in && (t + 1 - burn_in) % thin == 0 {
            out.beta.push(beta.as_slice().to_vec());
            out.sigma.push(sigma);
        }
    }
    out
}

/// Sample mean with a standard error from the effective sample size of a
/// lag-truncated autocorrelation sum.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let mut tau = 1.0;
    for lag in 1..n / 2 {
        let c: f64 = (0..n - lag).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum::<f64>() / (n as f64 * var);
        if c < 0.05 {
            break;
        }
        tau += 2.0 * c;
    }
    (mean, (var * tau / n as f64).sqrt())
}

/// GAL error with location 0 from the hierarchical mixture.
pub fn gal_error<R: Rng + ?Sized>(gamma: f64, p0: f64, sigma: f64, rng: &mut R) -> f64 {
    let k = coefs(gamma, p0);
    let v: f64 = sigma * rng.sample::<f64, _>(rand_distr::Exp1);
    let s: f64 = rng.sample::<f64, _>(StandardNormal).abs();
    let z: f64 = rng.sample(StandardNormal);
    sigma * k.alpha * s + k.a * v + (sigma * k.b * v).sqrt() * z
}

/// Design with an intercept and `d` standard normal covariates, and
/// responses with GAL errors.
pub fn gal_dataset<R: Rng + ?Sized>(
    n: usize,
    beta: &[f64],
    p0: f64,
    gamma: f64,
    sigma: f64,
    rng: &mut R,
) -> galqr_core::Dataset {
    let p = beta.len();
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
    let y = DVector::from_fn(n, |i, _| {
        let mu: f64 = (0..p).map(|j| x[(i, j)] * beta[j]).sum();
        mu + gal_error(gamma, p0, sigma, rng)
    });
    galqr_core::Dataset::new(x, y).expect("valid dataset")
}

/// Equal-tailed 95% interval of the draws.
pub fn interval95(draws: &[f64]) -> (f64, f64) {
    let mut d = draws.to_vec();
    d.sort_by(f64::total_cmp);
    let at = |q: f64| d[((d.len() - 1) as f64 * q).round() as usize];
    (at(0.025), at(0.975))
}
