//! The generalized asymmetric Laplace (GAL) distribution.
//!
//! Two parameterizations are exposed:
//!
//! * raw `(p, alpha, mu, sigma)`, where the density is the mixture of
//!   `N(mu + sigma alpha s + sigma A(p) z, sigma^2 B(p) z)` over `z ~ Exp(1)`
//!   and `s ~ N+(0, 1)`;
//! * quantile-fixed `(p0, gamma, mu, sigma)`, in which `mu` is the
//!   `p0`-quantile for every admissible `gamma` in `(L, U)`.
//!
//! The link is `p = I(gamma < 0) + (p0 - I(gamma < 0)) / g(gamma)` with
//! `g(gamma) = 2 Phi(-|gamma|) exp(gamma^2 / 2)`, and `alpha = C |gamma|` with
//! `C = 1 / (I(gamma > 0) - p)`.

mod density;

pub(crate) use density::rho;
pub use density::{
    al_logpdf, gal_cdf, gal_logpdf, gal_logpdf_raw, gal_pdf, gal_sample, gal_sample_latents, std_cdf_raw,
    std_logpdf_raw, AL_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::std_normal_logcdf;

/// `ln g(gamma)`, evaluated as `ln 2 + ln Phi(-|gamma|) + gamma^2 / 2` so it
/// stays finite for any `gamma`.
pub fn ln_g(gamma: f64) -> f64 {
    std::f64::consts::LN_2 + std_normal_logcdf(-gamma.abs()) + 0.5 * gamma * gamma
}

/// `g(gamma) = 2 Phi(-|gamma|) exp(gamma^2 / 2)`; even, with values in `(0, 1]`.
pub fn g_func(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    ln_g(gamma).exp()
}

/// Admissible interval `(lower, upper)` for the shape `gamma` at quantile
/// level `p0`: `g(lower) = 1 - p0` with `lower < 0`, `g(upper) = p0` with
/// `upper > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSupport {
    pub p0: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Positive root of `g(gamma) = target` by bisection; the bracket's upper end
/// is found by doubling from 1.
fn positive_root_of_g(target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g_func(hi) >= target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-12 {
            break;
        }
        if g_func(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn gamma_support(p0: f64) -> Result<GammaSupport> {
    check_p0(p0)?;
    Ok(GammaSupport {
        p0,
        lower: -positive_root_of_g(1.0 - p0),
        upper: positive_root_of_g(p0),
    })
}

fn check_p0(p0: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return domain(format!("quantile level must lie in (0, 1), got {p0}"));
    }
    Ok(())
}

impl GammaSupport {
    pub fn new(p0: f64) -> Result<Self> {
        gamma_support(p0)
    }

    pub fn contains(&self, gamma: f64) -> bool {
        gamma > self.lower && gamma < self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Position of `gamma` in the support rescaled to `(0, 1)`.
    pub fn to_unit(&self, gamma: f64) -> f64 {
        (gamma - self.lower) / self.width()
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.lower + u * self.width()
    }
}

/// `p(gamma, p0) = I(gamma < 0) + (p0 - I(gamma < 0)) / g(gamma)`.
pub fn p_of_gamma(gamma: f64, p0: f64) -> Result<f64> {
    let support = gamma_support(p0)?;
    if gamma != 0.0 && !support.contains(gamma) {
        return domain(format!(
            "gamma = {gamma} outside ({}, {}) for p0 = {p0}",
            support.lower, support.upper
        ));
    }
    Ok(p_unchecked(gamma, p0))
}

fn p_unchecked(gamma: f64, p0: f64) -> f64 {
    if gamma == 0.0 {
        p0
    } else if gamma < 0.0 {
        1.0 + (p0 - 1.0) / g_func(gamma)
    } else {
        p0 / g_func(gamma)
    }
}

/// `H(gamma) = gamma g(gamma) / (g(gamma) - |p0 - I(gamma < 0)|)`, the
/// coefficient on `sigma s_i` in the adjusted check loss.
pub fn h_func(gamma: f64, p0: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let g = g_func(gamma);
    let shift = if gamma < 0.0 { 1.0 - p0 } else { p0 };
    gamma * g / (g - shift)
}

/// `A(p) = (1 - 2p) / (p (1 - p))`
#[inline]
pub fn al_a(p: f64) -> f64 {
    (1.0 - 2.0 * p) / (p * (1.0 - p))
}

/// `B(p) = 2 / (p (1 - p))`
#[inline]
pub fn al_b(p: f64) -> f64 {
    2.0 / (p * (1.0 - p))
}

/// Location/scale-free coefficients of the quantile-fixed GAL at one
/// `(p0, gamma)`: everything the hierarchical model needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalShape {
    pub p0: f64,
    pub gamma: f64,
    /// Mixing probability `p(gamma, p0)`.
    pub p: f64,
    /// `A(p)`
    pub a: f64,
    /// `B(p)`
    pub b: f64,
    /// `C = 1 / (I(gamma > 0) - p)`
    pub c: f64,
    /// `C |gamma|`, equal to `H(gamma)` and to the raw shape `alpha`.
    pub alpha: f64,
}

impl GalShape {
    /// Coefficients at `gamma`, which must lie in `support` (or be zero).
    pub fn new(gamma: f64, support: &GammaSupport) -> Result<Self> {
        let p0 = support.p0;
        if gamma != 0.0 && !support.contains(gamma) {
            return domain(format!(
                "gamma = {gamma} outside ({}, {}) for p0 = {p0}",
                support.lower, support.upper
            ));
        }
        let p = p_unchecked(gamma, p0);
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("gamma = {gamma} too close to the support boundary (p = {p})"));
        }
        let c = 1.0 / (if gamma > 0.0 { 1.0 } else { 0.0 } - p);
        Ok(Self {
            p0,
            gamma,
            p,
            a: al_a(p),
            b: al_b(p),
            c,
            alpha: c * gamma.abs(),
        })
    }

    /// The asymmetric Laplace special case, `gamma = 0`.
    pub fn al(p0: f64) -> Result<Self> {
        check_p0(p0)?;
        Ok(Self {
            p0,
            gamma: 0.0,
            p: p0,
            a: al_a(p0),
            b: al_b(p0),
            c: -1.0 / p0,
            alpha: 0.0,
        })
    }

    /// Mean of the standardized (`mu = 0`, `sigma = 1`) distribution:
    /// `alpha sqrt(2/pi) + A`.
    pub fn std_mean(&self) -> f64 {
        self.alpha * (2.0 / std::f64::consts::PI).sqrt() + self.a
    }
}

/// Raw parameterization `(p, alpha, mu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalRawParams {
    pub p: f64,
    pub alpha: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl GalRawParams {
    pub fn new(p: f64, alpha: f64, mu: f64, sigma: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("p must lie in (0, 1), got {p}"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("sigma must be positive, got {sigma}"));
        }
        if !(alpha.is_finite() && mu.is_finite()) {
            return domain("alpha and mu must be finite");
        }
        Ok(Self { p, alpha, mu, sigma })
    }

    /// `p - I(alpha > 0)`
    pub fn p_plus(&self) -> f64 {
        self.p - if self.alpha > 0.0 { 1.0 } else { 0.0 }
    }

    /// `p - I(alpha < 0)`
    pub fn p_minus(&self) -> f64 {
        self.p - if self.alpha < 0.0 { 1.0 } else { 0.0 }
    }
}

/// Quantile-fixed parameterization `(p0, gamma, mu, sigma)` with cached
/// derived coefficients and support bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalParams {
    pub mu: f64,
    pub sigma: f64,
    pub shape: GalShape,
    pub support: GammaSupport,
}

impl GalParams {
    pub fn new(p0: f64, gamma: f64, mu: f64, sigma: f64) -> Result<Self> {
        let support = gamma_support(p0)?;
        Self::with_support(gamma, mu, sigma, &support)
    }

    pub fn with_support(gamma: f64, mu: f64, sigma: f64, support: &GammaSupport) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("sigma must be positive, got {sigma}"));
        }
        if !mu.is_finite() {
            return domain("mu must be finite");
        }
        Ok(Self {
            mu,
            sigma,
            shape: GalShape::new(gamma, support)?,
            support: *support,
        })
    }

    pub fn from_shape(shape: GalShape, mu: f64, sigma: f64, support: &GammaSupport) -> Self {
        Self {
            mu,
            sigma,
            shape,
            support: *support,
        }
    }

    pub fn p0(&self) -> f64 {
        self.shape.p0
    }

    pub fn gamma(&self) -> f64 {
        self.shape.gamma
    }

    /// `H(gamma)`; identical to `C |gamma|`.
    pub fn h(&self) -> f64 {
        self.shape.alpha
    }

    pub fn to_raw(&self) -> GalRawParams {
        GalRawParams {
            p: self.shape.p,
            alpha: self.shape.alpha,
            mu: self.mu,
            sigma: self.sigma,
        }
    }
}

/// Latent mixing variables of one GAL draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalLatents {
    /// Exponential mixing variable, `z ~ Exp(1)`.
    pub z: f64,
    /// Half-normal mixing variable, `s ~ N+(0, 1)`.
    pub s: f64,
}
