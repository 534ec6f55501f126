//! Error laws of the simulation study, each offset so that its
//! `p0`-quantile is exactly zero.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kernels::{gpd_log_cdf, gpd_log_quantile, sample_gpd_log, GpdParams};
use crate::special::{std_normal_cdf, std_normal_quantile};

pub const NORMAL_VARIANCE: f64 = 9.0;
pub const LAPLACE_SCALE: f64 = 3.0;
/// `0.1 N(mu, 1) + 0.9 N(mu + 1, 5)`
pub const MIXTURE_WEIGHT: f64 = 0.1;
pub const MIXTURE_SHIFT: f64 = 1.0;
pub const MIXTURE_VARIANCE: f64 = 5.0;
pub const GPD_XI: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLaw {
    /// `N(mu, 9)`, variance 9.
    Normal,
    /// `Laplace(mu, 3)`, scale 3.
    Laplace,
    /// `0.1 N(mu, 1) + 0.9 N(mu + 1, 5)`.
    NormalMixture,
    /// Log of a generalized Pareto variate with `xi = 3`.
    GpdLog,
}

impl ErrorLaw {
    pub const ALL: [ErrorLaw; 4] = [
        ErrorLaw::Normal,
        ErrorLaw::Laplace,
        ErrorLaw::NormalMixture,
        ErrorLaw::GpdLog,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ErrorLaw::Normal => "normal",
            ErrorLaw::Laplace => "laplace",
            ErrorLaw::NormalMixture => "normal_mixture",
            ErrorLaw::GpdLog => "gpd_log",
        }
    }
}

fn laplace_quantile(p: f64, scale: f64) -> f64 {
    if p < 0.5 {
        scale * (2.0 * p).ln()
    } else {
        -scale * (2.0 * (1.0 - p)).ln()
    }
}

fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

fn mixture_cdf(x: f64, mu: f64) -> f64 {
    MIXTURE_WEIGHT * std_normal_cdf(x - mu)
        + (1.0 - MIXTURE_WEIGHT) * std_normal_cdf((x - mu - MIXTURE_SHIFT) / MIXTURE_VARIANCE.sqrt())
}

/// `p0`-quantile of the mixture with `mu = 0`, by bisection on its CDF.
fn mixture_quantile(p0: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while mixture_cdf(lo, 0.0) > p0 {
        lo *= 2.0;
    }
    while mixture_cdf(hi, 0.0) < p0 {
        hi *= 2.0;
    }
    assert!(
        mixture_cdf(lo, 0.0) <= p0 && mixture_cdf(hi, 0.0) >= p0,
        "mixture root not bracketed"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mixture_cdf(mid, 0.0) < p0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Location offset `mu` (or the GPD scale `sigma` for the log-GPD law) that
/// puts the `p0`-quantile at zero.
pub fn solve_quantile_offset(law: ErrorLaw, p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return domain(format!("p0 must lie in (0, 1), got {p0}"));
    }
    Ok(match law {
        ErrorLaw::Normal => -NORMAL_VARIANCE.sqrt() * std_normal_quantile(p0),
        ErrorLaw::Laplace => -laplace_quantile(p0, LAPLACE_SCALE),
        ErrorLaw::NormalMixture => -mixture_quantile(p0),
        ErrorLaw::GpdLog => GPD_XI / ((-GPD_XI * (-p0).ln_1p()).exp_m1()),
    })
}

/// An error law with its offset solved for a quantile level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinnedLaw {
    pub law: ErrorLaw,
    pub p0: f64,
    pub offset: f64,
}

impl PinnedLaw {
    pub fn new(law: ErrorLaw, p0: f64) -> Result<Self> {
        Ok(Self {
            law,
            p0,
            offset: solve_quantile_offset(law, p0)?,
        })
    }

    fn gpd(&self) -> GpdParams {
        GpdParams {
            sigma: self.offset,
            xi: GPD_XI,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let mu = self.offset;
        match self.law {
            ErrorLaw::Normal => std_normal_cdf((x - mu) / NORMAL_VARIANCE.sqrt()),
            ErrorLaw::Laplace => laplace_cdf(x - mu, LAPLACE_SCALE),
            ErrorLaw::NormalMixture => mixture_cdf(x, mu),
            ErrorLaw::GpdLog => gpd_log_cdf(x, &self.gpd()),
        }
    }

    /// The `p0`-quantile computed from the closed forms (zero up to rounding
    /// for the analytic laws).
    pub fn pinned_quantile(&self) -> f64 {
        match self.law {
            ErrorLaw::Normal => self.offset + NORMAL_VARIANCE.sqrt() * std_normal_quantile(self.p0),
            ErrorLaw::Laplace => self.offset + laplace_quantile(self.p0, LAPLACE_SCALE),
            ErrorLaw::NormalMixture => self.offset + mixture_quantile(self.p0),
            ErrorLaw::GpdLog => gpd_log_quantile(self.p0, &self.gpd()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mu = self.offset;
        match self.law {
            ErrorLaw::Normal => {
                let z: f64 = StandardNormal.sample(rng);
                mu + NORMAL_VARIANCE.sqrt() * z
            }
            ErrorLaw::Laplace => {
                let a: f64 = Exp1.sample(rng);
                let b: f64 = Exp1.sample(rng);
                mu + LAPLACE_SCALE * (a - b)
            }
            ErrorLaw::NormalMixture => {
                let z: f64 = StandardNormal.sample(rng);
                if rng.random::<f64>() < MIXTURE_WEIGHT {
                    mu + z
                } else {
                    mu + MIXTURE_SHIFT + MIXTURE_VARIANCE.sqrt() * z
                }
            }
            ErrorLaw::GpdLog => sample_gpd_log(&self.gpd(), rng),
        }
    }
}
