//! Hierarchical Laplace prior and the adjusted check loss.

use super::{coefs, phi_cdf};
use galqr_core::gal::{GalShape, GammaSupport};
use galqr_core::rng::stream_rng;
use galqr_core::sampler::updates::v_conditional;
use galqr_core::sampler::{
    beta_conditional, update_beta, update_eta2, update_omega, ChainState, GaussianPrior, LassoLatents, LassoPriorConfig,
};
use galqr_testkit::ks_one_sample;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Gamma};

const P0S: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

fn empty_state(p: usize, p0: f64) -> ChainState {
    ChainState {
        beta: DVector::zeros(p),
        sigma: 1.0,
        shape: GalShape::al(p0).unwrap(),
        v: Vec::new(),
        s: Vec::new(),
    }
}

fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

/// Gibbs sampling of the prior alone (no observations). At fixed `eta2`
/// every slope is marginally Laplace with scale `1 / eta`; with `eta2`
/// updated too its marginal stays at the gamma prior.
fn prior_gibbs(
    d: usize,
    eta2: Option<f64>,
    cfg: &LassoPriorConfig,
    draws: usize,
    thin: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = stream_rng(20, eta2.is_some() as u64);
    let x = DMatrix::<f64>::zeros(0, d + 1);
    let y = DVector::<f64>::zeros(0);
    let mut state = empty_state(d + 1, 0.5);
    let mut lat = LassoLatents::initial(d);
    if let Some(e) = eta2 {
        lat.eta2 = e;
    }
    let mut slopes: Vec<Vec<f64>> = (0..d).map(|_| Vec::with_capacity(draws)).collect();
    let mut etas = Vec::with_capacity(draws);
    for t in 0..draws * thin {
        state.beta = update_beta(&state, &x, &y, &lat.coefficient_prior(cfg), &mut rng)
            .unwrap()
            .beta;
        lat.omega = update_omega(&state.beta.as_slice()[1..], lat.eta2, &mut rng);
        if eta2.is_none() {
            lat.eta2 = update_eta2(&lat.omega, cfg, &mut rng);
        }
        if (t + 1) % thin == 0 {
            for (k, col) in slopes.iter_mut().enumerate() {
                col.push(state.beta[k + 1]);
            }
            etas.push(lat.eta2);
        }
    }
    (slopes, etas)
}

pub fn slope_prior_is_laplace() {
    let eta2 = 2.5;
    let (slopes, _) = prior_gibbs(3, Some(eta2), &LassoPriorConfig::default(), 20_000, 10);
    for (k, col) in slopes.iter().enumerate() {
        let r = ks_one_sample(col, |x| laplace_cdf(x, 1.0 / eta2.sqrt()));
        assert!(r.p_value > 0.01 / 3.0, "slope {k}: {r:?}");
    }
}

pub fn penalty_update_keeps_its_gamma_prior() {
    let cfg = LassoPriorConfig {
        a_eta: 3.0,
        b_eta: 2.0,
        ..LassoPriorConfig::default()
    };
    let (_, etas) = prior_gibbs(2, None, &cfg, 20_000, 10);
    let prior = Gamma::new(cfg.a_eta, cfg.b_eta).unwrap();
    let r = ks_one_sample(&etas, |x| prior.cdf(x));
    assert!(r.p_value > 0.01, "{r:?}");
}

fn check_loss(u: f64, p: f64) -> f64 {
    if u < 0.0 {
        u * (p - 1.0)
    } else {
        u * p
    }
}

/// Exact minimizer of `sum rho_p(z_i - x_i'beta)` for two coefficients: an
/// optimum interpolates two observations, so every pair is tried.
fn vertex_minimizer(x: &DMatrix<f64>, z: &[f64], p: f64) -> Vec<f64> {
    let n = z.len();
    let loss = |b: &[f64]| -> f64 {
        (0..n)
            .map(|i| check_loss(z[i] - x[(i, 0)] * b[0] - x[(i, 1)] * b[1], p))
            .sum()
    };
    let mut best = (f64::INFINITY, vec![0.0, 0.0]);
    for i in 0..n {
        for j in i + 1..n {
            let det = x[(i, 0)] * x[(j, 1)] - x[(i, 1)] * x[(j, 0)];
            if det.abs() < 1e-12 {
                continue;
            }
            let b0 = (z[i] * x[(j, 1)] - x[(i, 1)] * z[j]) / det;
            let b1 = (x[(i, 0)] * z[j] - z[i] * x[(j, 0)]) / det;
            let l = loss(&[b0, b1]);
            if l < best.0 {
                best = (l, vec![b0, b1]);
            }
        }
    }
    best.1
}

/// Mode of the coefficient conditional with `v` integrated out, by
/// expectation-maximization over the exponential latents: each step replaces
/// `1 / v_i` by its conditional expectation `sqrt(b / a_i)` and takes the
/// mean of the Gaussian conditional under a flat prior.
fn conditional_mode(state: &ChainState, x: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    let p = x.ncols();
    let flat = GaussianPrior {
        precision: DMatrix::zeros(p, p),
        precision_mean: DVector::zeros(p),
    };
    let mut st = state.clone();
    for _ in 0..1_000_000 {
        let xb = x * &st.beta;
        for i in 0..y.len() {
            let (a, b) = v_conditional(&st, y[i] - xb[i], st.s[i]);
            // floor at residuals near 1e-12 so exact fits keep finite weights
            st.v[i] = 1.0 / (b / a.max(1e-24)).sqrt();
        }
        let (q, r) = beta_conditional(&st, x, y, &flat);
        let next = q.cholesky().unwrap().solve(&r);
        let change = (&next - &st.beta).amax();
        st.beta = next;
        if change < 1e-14 {
            break;
        }
    }
    st.beta.as_slice().to_vec()
}

pub fn flat_prior_mode_minimizes_adjusted_loss() {
    let n = 15;
    let mut rng = stream_rng(21, 0);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.sample(StandardNormal) });
    let y = DVector::from_fn(n, |i, _| 0.5 + 1.5 * x[(i, 1)] + rng.sample::<f64, _>(StandardNormal));
    let s: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
    let sigma = 0.8;
    for &p0 in &[0.25, 0.5] {
        let support = GammaSupport::new(p0).unwrap();
        for gamma in [0.6 * support.lower, 0.0, 0.3 * support.upper] {
            let shape = GalShape::new(gamma, &support).unwrap();
            let state = ChainState {
                beta: DVector::from_vec(vec![0.0, 1.0]),
                sigma,
                shape,
                v: vec![1.0; n],
                s: s.clone(),
            };
            // adjusted responses y_i - sigma H(gamma) s_i with H from its own formula
            let h = h_formula(gamma, p0);
            let z: Vec<f64> = (0..n).map(|i| y[i] - sigma * h * s[i]).collect();
            let k = coefs(gamma, p0);
            if gamma == 0.0 {
                assert_eq!(k.p, p0);
            }
            let exact = vertex_minimizer(&x, &z, k.p);
            let mode = conditional_mode(&state, &x, &y);
            for j in 0..2 {
                assert!(
                    (mode[j] - exact[j]).abs() < 1e-6,
                    "p0={p0} gamma={gamma}: {mode:?} vs {exact:?}"
                );
            }
        }
    }
}

/// `H(gamma) = gamma g(gamma) / {g(gamma) - |p0 - I(gamma < 0)|}`.
fn h_formula(gamma: f64, p0: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let g = 2.0 * phi_cdf(-gamma.abs()) * (0.5 * gamma * gamma).exp();
    let ind = if gamma < 0.0 { 1.0 } else { 0.0 };
    gamma * g / (g - (p0 - ind).abs())
}

pub fn h_equals_c_times_abs_gamma() {
    for &p0 in &P0S {
        let support = GammaSupport::new(p0).unwrap();
        for i in 1..1000 {
            let gamma = support.from_unit(i as f64 / 1000.0);
            let shape = GalShape::new(gamma, &support).unwrap();
            let h = h_formula(gamma, p0);
            // relative, widened by the conditioning of g - |p0 - I| near the bounds
            let tol = 1e-12 * h.abs().max(1.0) * (h / gamma).abs().max(1.0);
            assert!(
                (shape.alpha - h).abs() < tol,
                "p0={p0} gamma={gamma}: {} vs {h}",
                shape.alpha
            );
            assert!((shape.c * gamma.abs() - h).abs() < tol);
        }
    }
}
