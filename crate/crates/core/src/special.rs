//! Standard-normal special functions on the log scale, plus the modified
//! Bessel function of the second kind used to normalize GIG densities.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use libm::erfc;

/// `ln(sqrt(2 * pi))`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this standardized argument `ln Phi` switches from `erfc` to the
/// continued fraction for the Mills ratio.
const MILLS_SWITCH: f64 = -20.0;

#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

#[inline]
pub fn std_normal_logpdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `Phi^-1(p)`: the `statrs` inverse refined by two Newton steps against the
/// `erfc`-based CDF.
pub fn std_normal_quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    let mut x = Normal::standard().inverse_cdf(p);
    for _ in 0..2 {
        let pdf = std_normal_pdf(x);
        if pdf > 0.0 {
            x -= (std_normal_cdf(x) - p) / pdf;
        }
    }
    x
}

/// Mills ratio `Phi(-t) / phi(t)` for `t > 0` by Lentz's algorithm on the
/// continued fraction `1 / (t + 1/(t + 2/(t + 3/(t + ...))))`.
pub fn mills_ratio(t: f64) -> f64 {
    debug_assert!(t > 0.0);
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..10_000 {
        let a = k as f64;
        d = t + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = t + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln Phi(x)`, finite for every finite `x`.
pub fn std_normal_logcdf(x: f64) -> f64 {
    if x > 0.0 {
        (-0.5 * erfc(x * FRAC_1_SQRT_2)).ln_1p()
    } else if x > MILLS_SWITCH {
        (0.5 * erfc(-x * FRAC_1_SQRT_2)).ln()
    } else if x.is_finite() {
        std_normal_logpdf(x) + mills_ratio(-x).ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `ln(1 - exp(-x))` for `x > 0`.
#[inline]
pub fn log1mexp(x: f64) -> f64 {
    if x < LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `ln(exp(a) + exp(b))`
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln(Phi(hi) - Phi(lo))` for `lo <= hi`, without cancellation in either
/// tail.
pub fn log_diff_phi(lo: f64, hi: f64) -> f64 {
    if lo >= hi {
        return f64::NEG_INFINITY;
    }
    if lo > 0.0 {
        // Phi(hi) - Phi(lo) = Phi(-lo) - Phi(-hi)
        let a = std_normal_logcdf(-lo);
        let b = std_normal_logcdf(-hi);
        a + log1mexp(a - b)
    } else {
        let a = std_normal_logcdf(hi);
        let b = std_normal_logcdf(lo);
        a + log1mexp(a - b)
    }
}

/// `ln K_nu(x)` for `x > 0`, from `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`
/// evaluated with the trapezoid rule around the peak of the integrand.
///
/// The integrand is analytic and decays doubly exponentially, so the
/// trapezoid rule converges geometrically in the step size.
pub fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let nu = nu.abs();
    let log_integrand = |t: f64| -> f64 {
        // -x (cosh t - 1) + ln cosh(nu t); both parts computed without overflow
        let cosh_m1 = if t < 1.0 {
            2.0 * (0.5 * t).sinh().powi(2)
        } else {
            0.5 * ((t).exp() + (-t).exp()) - 1.0
        };
        let nt = nu * t;
        let ln_cosh = nt + (-2.0 * nt).exp().ln_1p() - LN_2;
        -x * cosh_m1 + ln_cosh
    };
    // Peak: x sinh t = nu tanh(nu t); solve by bisection on [0, asinh(nu/x) + 1].
    let mut peak = 0.0;
    if nu > 0.0 {
        let slope = |t: f64| -x * t.sinh() + nu * (nu * t).tanh();
        if slope(1e-12) > 0.0 {
            let mut lo = 0.0;
            let mut hi = (nu / x).asinh() + 1.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            peak = 0.5 * (lo + hi);
        }
    }
    let top = log_integrand(peak);
    let curvature = x * peak.cosh() + 1e-300;
    let width = (1.0 / curvature).sqrt().min(1.0);
    let step = (width / 16.0).min(0.05);
    // The integrand is even in t: sum the trapezoid rule over the whole line
    // on the grid peak + k * step, then halve.
    let mut sum = 0.0;
    let mut k = 0i64;
    loop {
        let t = peak + step * k as f64;
        let v = log_integrand(t) - top;
        sum += v.exp();
        if v < -60.0 {
            break;
        }
        k += 1;
    }
    let mut k = 1i64;
    loop {
        let t = peak - step * k as f64;
        let v = log_integrand(t.abs()) - top;
        sum += v.exp();
        if v < -60.0 && t < -peak {
            break;
        }
        k += 1;
    }
    top - x + (0.5 * sum * step).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_reference_and_round_trip() {
        assert!((std_normal_quantile(0.05) + 1.644_853_626_951_472_2).abs() < 1e-14);
        assert_eq!(std_normal_quantile(0.5), 0.0);
        for &p in &[1e-12, 1e-5, 0.01, 0.3, 0.77, 0.999] {
            let x = std_normal_quantile(p);
            assert!((std_normal_cdf(x) / p - 1.0).abs() < 1e-13, "{p}");
        }
    }

    #[test]
    fn cdf_and_pdf_reference_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((std_normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-14);
    }

    #[test]
    fn mills_ratio_matches_erfc_where_both_are_accurate() {
        for &t in &[6.0, 10.0, 15.0, 19.0, 25.0] {
            let direct = (0.5 * erfc(t * FRAC_1_SQRT_2)).ln();
            let cf = std_normal_logpdf(t) + mills_ratio(t).ln();
            assert!(
                (direct - cf).abs() < 1e-12 * direct.abs(),
                "t={t} {direct} {cf} {}",
                mills_ratio(t)
            );
        }
    }

    #[test]
    fn logcdf_deep_tail_matches_asymptotic_series() {
        // ln Phi(-x) = ln phi(x) - ln x + ln(1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - 945/x^10)
        for &x in &[30.0f64, 40.0, 50.0, 1e3] {
            let x2 = x * x;
            let series =
                1.0 - 1.0 / x2 + 3.0 / x2.powi(2) - 15.0 / x2.powi(3) + 105.0 / x2.powi(4) - 945.0 / x2.powi(5);
            let want = -0.5 * x2 - LN_SQRT_2PI - x.ln() + series.ln();
            let got = std_normal_logcdf(-x);
            assert!((got - want).abs() < 1e-12 * want.abs(), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn logcdf_is_monotone_and_finite_on_wide_range() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20_000 {
            let x = -50.0 + 100.0 * i as f64 / 20_000.0;
            let v = std_normal_logcdf(x);
            assert!(v.is_finite());
            assert!(v >= prev, "not monotone at {x}");
            prev = v;
        }
    }

    #[test]
    fn log_diff_phi_both_tails() {
        let want = (std_normal_cdf(1.0) - std_normal_cdf(-1.0)).ln();
        assert!((log_diff_phi(-1.0, 1.0) - want).abs() < 1e-14);
        // upper tail: Phi(9) - Phi(8) = Phi(-8) - Phi(-9)
        let a = std_normal_logcdf(-8.0);
        let b = std_normal_logcdf(-9.0);
        let want = a + (1.0 - (b - a).exp()).ln();
        assert!((log_diff_phi(8.0, 9.0) - want).abs() < 1e-12);
        assert_eq!(log_diff_phi(1.0, 1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn bessel_k_reference_values() {
        // K_{1/2}(x) = sqrt(pi / (2x)) e^{-x}
        for &x in &[1e-6, 0.01, 0.3, 1.0, 5.0, 80.0, 1e4] {
            let want = 0.5 * (std::f64::consts::PI / (2.0 * x)).ln() - x;
            let got = ln_bessel_k(0.5, x);
            assert!((got - want).abs() < 1e-10, "x={x}: {got} vs {want}");
            // K_{3/2}(x) = K_{1/2}(x) (1 + 1/x)
            let want = want + (1.0 + 1.0 / x).ln();
            let got = ln_bessel_k(1.5, x);
            assert!((got - want).abs() < 1e-10, "x={x}: {got} vs {want}");
        }
        assert!((ln_bessel_k(0.0, 1.0) - 0.421_024_438_240_708_3f64.ln()).abs() < 1e-12);
        assert!((ln_bessel_k(1.0, 1.0) - 0.601_907_230_197_234_6f64.ln()).abs() < 1e-12);
        assert!((ln_bessel_k(1.0, 1.0) - ln_bessel_k(-1.0, 1.0)).abs() < 1e-15);
    }
}
