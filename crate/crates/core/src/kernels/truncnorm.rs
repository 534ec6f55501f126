//! Truncated-normal sampling.
//!
//! Truncation points more than half a standard deviation above the mean use
//! Robert's translated-exponential proposal; anything closer uses plain
//! rejection from the untruncated normal. Draws are returned as the excess
//! over the truncation point so that deep-tail cases never round onto the
//! wrong side of the boundary.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

const EXPONENTIAL_SWITCH: f64 = 0.5;

/// Excess `Z - alpha` of a standard normal conditioned on `Z > alpha`.
fn std_tail_excess<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha > EXPONENTIAL_SWITCH {
        let rate = 0.5 * (alpha + (alpha * alpha + 4.0).sqrt());
        loop {
            let e: f64 = Exp1.sample(rng);
            let e = e / rate;
            let z = alpha + e - rate;
            let u: f64 = rng.random();
            if u.ln() <= -0.5 * z * z && e > 0.0 {
                return e;
            }
        }
    } else {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let e = z - alpha;
            if e > 0.0 {
                return e;
            }
        }
    }
}

/// `N(mean, variance)` restricted to `(0, inf)`.
pub fn sample_truncnorm_positive<R: Rng + ?Sized>(mean: f64, variance: f64, rng: &mut R) -> f64 {
    let sd = variance.sqrt();
    loop {
        let x = sd * std_tail_excess(-mean / sd, rng);
        if x > 0.0 {
            return x;
        }
    }
}

/// `N(mean, variance)` restricted to `(-inf, 0)`.
pub fn sample_truncnorm_negative<R: Rng + ?Sized>(mean: f64, variance: f64, rng: &mut R) -> f64 {
    -sample_truncnorm_positive(-mean, variance, rng)
}

/// `N(mean, variance)` restricted to `(lower, inf)`.
pub fn sample_truncnorm_above<R: Rng + ?Sized>(mean: f64, variance: f64, lower: f64, rng: &mut R) -> f64 {
    lower + sample_truncnorm_positive(mean - lower, variance, rng)
}

/// `N(mean, variance)` restricted to `(-inf, upper)`.
pub fn sample_truncnorm_below<R: Rng + ?Sized>(mean: f64, variance: f64, upper: f64, rng: &mut R) -> f64 {
    let x = upper + sample_truncnorm_negative(mean - upper, variance, rng);
    x.min(upper)
}

/// Standard normal restricted to `(lo, hi)` with `0 <= lo < hi`. Picks the
/// better of two rejection schemes: tail proposal with rejection above `hi`,
/// or a uniform proposal on `(lo, hi)` accepted with `exp((lo^2 - z^2) / 2)`.
fn std_interval_upper<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    use crate::special::{std_normal_logcdf, std_normal_logpdf};
    let log_tail_lo = std_normal_logcdf(-lo);
    let log_tail_hi = std_normal_logcdf(-hi);
    // P(Z < hi | Z > lo)
    let tail_eff = -(log_tail_hi - log_tail_lo).exp_m1();
    // mass / (width * phi(lo))
    let log_mass = log_tail_lo + crate::special::log1mexp(log_tail_hi - log_tail_lo);
    let unif_eff = (log_mass - (hi - lo).ln() - std_normal_logpdf(lo)).exp();
    if tail_eff >= unif_eff {
        loop {
            let z = lo + std_tail_excess(lo, rng);
            if z < hi {
                return z;
            }
        }
    } else {
        loop {
            let z = lo + (hi - lo) * rng.random::<f64>();
            let u: f64 = rng.random();
            if u.ln() <= 0.5 * (lo * lo - z * z) {
                return z;
            }
        }
    }
}

/// `N(mean, variance)` restricted to `(lower, upper)`; either bound may be
/// infinite.
pub fn sample_truncnorm_interval<R: Rng + ?Sized>(
    mean: f64,
    variance: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> f64 {
    assert!(lower < upper, "empty truncation interval ({lower}, {upper})");
    let sd = variance.sqrt();
    let (a, b) = ((lower - mean) / sd, (upper - mean) / sd);
    let z = if b == f64::INFINITY {
        return sample_truncnorm_above(mean, variance, lower, rng);
    } else if a == f64::NEG_INFINITY {
        return sample_truncnorm_below(mean, variance, upper, rng);
    } else if a >= 0.0 {
        std_interval_upper(a, b, rng)
    } else if b <= 0.0 {
        -std_interval_upper(-b, -a, rng)
    } else if b - a > 2.5 {
        // straddles zero and wide: plain rejection accepts often
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > a && z < b {
                break z;
            }
        }
    } else {
        loop {
            let z = a + (b - a) * rng.random::<f64>();
            let u: f64 = rng.random();
            if u.ln() <= -0.5 * z * z {
                break z;
            }
        }
    };
    (mean + sd * z).clamp(lower, upper)
}
