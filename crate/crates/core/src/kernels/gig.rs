//! Generalized inverse-Gaussian distribution with density proportional to
//! `x^(nu - 1) exp(-(a / x + b x) / 2)`.
//!
//! Sampling follows Hörmann and Leydold (2014): the problem is reduced to the
//! two-parameter form `y^(lambda - 1) exp(-omega (y + 1/y) / 2)` with
//! `omega = sqrt(ab)`, `lambda = |nu|`, and one of three exact rejection
//! schemes is picked by `(lambda, omega)`:
//!
//! * ratio-of-uniforms with mode shift when `lambda > 2` or `omega > 3`,
//! * ratio-of-uniforms without shift for moderate parameters,
//! * a three-piece constant/power/exponential hat for `lambda < 1` and small
//!   `omega`, where ratio-of-uniforms degrades.
//!
//! The boundary cases `a = 0` (gamma) and `b = 0` (inverse gamma) are drawn
//! directly.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::special::ln_bessel_k;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    pub nu: f64,
    /// Coefficient of `1/x`.
    pub a: f64,
    /// Coefficient of `x`.
    pub b: f64,
}

impl GigParams {
    pub fn new(nu: f64, a: f64, b: f64) -> Result<Self> {
        let p = Self { nu, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { nu, a, b } = *self;
        if !(nu.is_finite() && a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
            return domain(format!("GIG parameters must be finite with a, b >= 0: {self:?}"));
        }
        if nu <= 0.0 && a <= 0.0 {
            return domain(format!("GIG with nu <= 0 needs a > 0: {self:?}"));
        }
        if nu >= 0.0 && b <= 0.0 {
            return domain(format!("GIG with nu >= 0 needs b > 0: {self:?}"));
        }
        Ok(())
    }
}

/// Normalized log density. Returns `-inf` for `x <= 0`.
pub fn gig_logdensity(x: f64, params: &GigParams) -> f64 {
    if !(x > 0.0) {
        return f64::NEG_INFINITY;
    }
    let GigParams { nu, a, b } = *params;
    let kernel = (nu - 1.0) * x.ln() - 0.5 * (a / x + b * x);
    let log_norm = if a == 0.0 {
        // Gamma(nu, rate b/2)
        nu * (0.5 * b).ln() - ln_gamma(nu)
    } else if b == 0.0 {
        // inverse gamma, shape -nu, scale a/2
        -nu * (0.5 * a).ln() - ln_gamma(-nu)
    } else {
        let omega = a.sqrt() * b.sqrt();
        0.5 * nu * (b / a).ln() - std::f64::consts::LN_2 - ln_bessel_k(nu, omega)
    };
    kernel + log_norm
}

pub fn sample_gig<R: Rng + ?Sized>(params: &GigParams, rng: &mut R) -> f64 {
    let GigParams { nu, a, b } = *params;
    debug_assert!(params.validate().is_ok(), "{params:?}");
    if a == 0.0 {
        return Gamma::new(nu, 2.0 / b).expect("valid gamma").sample(rng);
    }
    if b == 0.0 {
        let g: f64 = Gamma::new(-nu, 2.0 / a).expect("valid gamma").sample(rng);
        return 1.0 / g;
    }
    let omega = a.sqrt() * b.sqrt();
    let scale = a.sqrt() / b.sqrt();
    let lambda = nu.abs();
    if omega == 0.0 {
        // a * b underflowed; the a -> 0 limit is only proper for nu > 0
        if nu > 0.0 {
            return Gamma::new(nu, 2.0 / b).expect("valid gamma").sample(rng);
        }
        let g: f64 = Gamma::new(-nu, 2.0 / a).expect("valid gamma").sample(rng);
        return 1.0 / g;
    }
    let y = if lambda > 2.0 || omega > 3.0 {
        rou_shifted(lambda, omega, rng)
    } else if lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_unshifted(lambda, omega, rng)
    } else {
        concave_hat(lambda, omega, rng)
    };
    if nu < 0.0 {
        scale / y
    } else {
        scale * y
    }
}

/// Mode of `y^(lambda - 1) exp(-omega (y + 1/y) / 2)`.
fn mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        ((lambda - 1.0).hypot(omega) + (lambda - 1.0)) / omega
    } else {
        omega / ((1.0 - lambda).hypot(omega) + (1.0 - lambda))
    }
}

/// Ratio-of-uniforms for the standardized GIG, no mode shift.
fn rou_unshifted<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + (lambda + 1.0).hypot(omega)) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u: f64 = um * rng.random::<f64>();
        let v: f64 = rng.random();
        if v == 0.0 || u == 0.0 {
            continue;
        }
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

/// Ratio-of-uniforms around the mode. The bounding rectangle comes from the
/// two positive roots of `x^3 + c2 x^2 + c1 x + c0`, the stationary points of
/// `(x - mode) sqrt(f(x))`.
fn rou_shifted<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let log_sqrt_f = |x: f64| t * x.ln() - s * (x + 1.0 / x) - nc;

    let c2 = -(2.0 * (lambda + 1.0) / omega + xm);
    let c1 = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c0 = xm;
    let cubic = |x: f64| ((x + c2) * x + c1) * x + c0;
    let cubic_d = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    // depressed cubic y^3 + p y + q with x = y - c2/3
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let mut below = f64::NAN;
    let mut above = f64::NAN;
    if p < 0.0 {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        for k in 0..3 {
            let mut x = 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - c2 / 3.0;
            for _ in 0..3 {
                let d = cubic_d(x);
                if d != 0.0 {
                    let nx = x - cubic(x) / d;
                    if nx.is_finite() {
                        x = nx;
                    }
                }
            }
            if x > 0.0 && x < xm {
                below = x;
            } else if x > xm {
                above = x;
            }
        }
    }
    if !(below.is_finite() && above.is_finite()) {
        return rou_unshifted(lambda, omega, rng);
    }
    let u_minus = (below - xm) * log_sqrt_f(below).exp();
    let u_plus = (above - xm) * log_sqrt_f(above).exp();
    loop {
        let u = u_minus + rng.random::<f64>() * (u_plus - u_minus);
        let v: f64 = rng.random();
        if v == 0.0 {
            continue;
        }
        let x = u / v + xm;
        if x > 0.0 && v.ln() <= log_sqrt_f(x) {
            return x;
        }
    }
}

/// Rejection from a hat that is constant on `[0, x0]`, a power function on
/// `[x0, 2/omega]` and exponential beyond. Valid for `0 <= lambda < 1`.
fn concave_hat<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * rng.random::<f64>();
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else {
            v -= a0;
            if v <= a1 {
                if lambda == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    hx = k1 * x.powf(lambda - 1.0);
                }
            } else {
                v -= a1;
                let start = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * start).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        if !(x > 0.0) || !x.is_finite() {
            continue;
        }
        let u = rng.random::<f64>() * hx;
        if u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}
