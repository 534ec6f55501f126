//! Numerical oracles used to validate the samplers and closed forms in
//! `galqr-core`.
//!
//! Nothing here shares code with the library under test: integrals are
//! computed by adaptive Gauss-Kronrod quadrature, conditionals by brute-force
//! grid normalization, and goodness of fit by Kolmogorov-Smirnov and
//! chi-square statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature over a finite interval.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0 };
    }
    let mut pieces = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let value: f64 = pieces.iter().map(|p| p.2 .0).sum();
        let error: f64 = pieces.iter().map(|p| p.2 .1).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Quadrature { value, error };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            pieces.push((lo, hi, (0.0, 0.0)));
            continue;
        }
        pieces.push((lo, mid, gk15(&f, lo, mid)));
        pieces.push((mid, hi, gk15(&f, mid, hi)));
    }
    Quadrature {
        value: pieces.iter().map(|p| p.2 .0).sum(),
        error: pieces.iter().map(|p| p.2 .1).sum(),
    }
}

/// Adaptive quadrature on any interval, including infinite endpoints.
///
/// Infinite ranges are mapped onto finite ones (`x = t / (1 - t^2)` for the
/// whole line, `x = a + t / (1 - t)` for half lines) before integrating.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Quadrature {
    integrate_tol(f, a, b, 1e-13, 1e-12)
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quadrature {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate_finite(f, a, b, abs_tol, rel_tol),
        (true, false) => integrate_finite(
            |t| {
                let x = a + t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                guard(f(x) * jac)
            },
            0.0,
            1.0,
            abs_tol,
            rel_tol,
        ),
        (false, true) => integrate_finite(
            |t| {
                let x = b - t / (1.0 - t);
                let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                guard(f(x) * jac)
            },
            0.0,
            1.0,
            abs_tol,
            rel_tol,
        ),
        (false, false) => integrate_finite(
            |t| {
                let d = 1.0 - t * t;
                let x = t / d;
                let jac = (1.0 + t * t) / (d * d);
                guard(f(x) * jac)
            },
            -1.0,
            1.0,
            abs_tol,
            rel_tol,
        ),
    }
}

/// Integrate piecewise across the given ordered breakpoints (kinks or
/// discontinuities of the integrand).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64]) -> Quadrature {
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let q = integrate(&f, w[0], w[1]);
        value += q.value;
        error += q.error;
    }
    Quadrature { value, error }
}

fn guard(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Result of a goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov tail probability `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against an analytic CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> GofResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    GofResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
    }
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> GofResult {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sn = ne.sqrt();
    GofResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
    }
}

/// Pearson chi-square test of observed counts against given expectations.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> GofResult {
    assert_eq!(observed.len(), expected.len());
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = (observed.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    GofResult {
        statistic: stat,
        p_value: 1.0 - dist.cdf(stat),
    }
}

/// Chi-square test that integer ranks in `0..=max_rank` are uniform, after
/// pooling them into `bins` equal-width bins.
pub fn rank_uniformity(ranks: &[usize], max_rank: usize, bins: usize) -> GofResult {
    let mut counts = vec![0u64; bins];
    let width = (max_rank + 1) as f64 / bins as f64;
    for &r in ranks {
        let b = ((r as f64) / width).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let expected = vec![ranks.len() as f64 / bins as f64; bins];
    chi_square(&counts, &expected)
}

/// Numerically normalized CDF of an unnormalized log density on `[lo, hi]`.
///
/// The density is evaluated on a uniform grid and accumulated with the
/// trapezoid rule; the CDF is linearly interpolated between grid points.
#[derive(Debug, Clone)]
pub struct GridCdf {
    lo: f64,
    step: f64,
    cum: Vec<f64>,
    pub mean: f64,
}

impl GridCdf {
    pub fn from_log_density<F: Fn(f64) -> f64>(log_density: F, lo: f64, hi: f64, n: usize) -> Self {
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let logs: Vec<f64> = xs.iter().map(|&x| log_density(x)).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = logs
            .iter()
            .map(|&l| if l.is_finite() { (l - top).exp() } else { 0.0 })
            .collect();
        let mut cum = vec![0.0; n];
        let mut first = 0.0;
        for i in 1..n {
            let area = 0.5 * step * (dens[i] + dens[i - 1]);
            cum[i] = cum[i - 1] + area;
            first += 0.5 * step * (xs[i] * dens[i] + xs[i - 1] * dens[i - 1]);
        }
        let total = cum[n - 1];
        for c in cum.iter_mut() {
            *c /= total;
        }
        Self {
            lo,
            step,
            cum,
            mean: first / total,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        if i + 1 >= self.cum.len() {
            return 1.0;
        }
        let frac = pos - i as f64;
        self.cum[i] * (1.0 - frac) + self.cum[i + 1] * frac
    }
}

/// Sample mean and unbiased sample variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Ranks of `truth` among `draws`: the number of draws strictly below it.
pub fn rank_of(truth: f64, draws: &[f64]) -> usize {
    draws.iter().filter(|&&d| d < truth).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_gaussian_is_one() {
        let q = integrate(
            |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            f64::NEG_INFINITY,
            f64::INFINITY,
        );
        assert!((q.value - 1.0).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn quadrature_half_line() {
        let q = integrate(|x| (-x).exp(), 0.0, f64::INFINITY);
        assert!((q.value - 1.0).abs() < 1e-12);
        let q = integrate(|x| x.exp(), f64::NEG_INFINITY, 0.0);
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_wrong_distribution() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).p_value > 0.99);
        assert!(ks_one_sample(&xs, |x| (x * x).clamp(0.0, 1.0)).p_value < 1e-6);
    }

    #[test]
    fn grid_cdf_of_exponential() {
        let g = GridCdf::from_log_density(|x| -x, 0.0, 40.0, 40_001);
        assert!((g.cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
        assert!((g.mean - 1.0).abs() < 1e-5);
    }
}
