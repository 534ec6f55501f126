//! Grid audits of every full conditional on a three-observation problem.
//! Each update is run repeatedly from a fixed state and its draws are
//! compared with the conditional obtained by normalizing the augmented joint
//! density numerically. Metropolis kernels are started from exact draws of
//! their target and must leave it invariant.

use super::{gal_logpdf_quadrature, knot_cdf, Grid2Sampler, GridSampler, Tiny};
use galqr_core::gal::{GalShape, GammaSupport};
use galqr_core::rng::stream_rng;
use galqr_core::sampler::marginal::shape_scale_move;
use galqr_core::sampler::{
    update_beta, update_gamma, update_s, update_s_marginal, update_sigma, update_v, update_w, ChainState, GammaStep,
    GammaUpdate, GaussianPrior, InverseGammaPrior, RescaledBetaPrior, ShapeScaleKind, ShapeScaleTarget,
};
use galqr_testkit::{ks_one_sample, GridCdf};
use nalgebra::DVector;

/// Every audit with its name, in run order.
pub const ALL: [(&str, fn()); 10] = [
    ("beta", coefficient_conditional),
    ("v", exponential_latent_conditional),
    ("s", half_normal_latent_conditional),
    ("sigma", scale_conditional),
    ("censored w", censored_response_conditional),
    ("s with v integrated", half_normal_latent_with_exponential_integrated),
    ("gamma step (conditional)", shape_step_given_both_latents),
    ("gamma step (collapsed)", shape_step_with_exponential_integrated),
    ("gamma step (marginal)", shape_step_with_both_latents_integrated),
    ("gamma/sigma moves", shape_scale_moves_leave_posterior_invariant),
];

const DRAWS: usize = 20_000;
/// Family-wise level of the goodness-of-fit tests in one test function;
/// each of its `k` comparisons is run at `LEVEL / k`.
const LEVEL: f64 = 0.01;
const P0: f64 = 0.3;

fn shapes() -> Vec<f64> {
    let s = GammaSupport::new(P0).unwrap();
    vec![0.5 * s.lower, 0.0, 0.4 * s.upper]
}

fn state(t: &Tiny) -> ChainState {
    let support = GammaSupport::new(t.p0).unwrap();
    ChainState {
        beta: t.beta.clone(),
        sigma: t.sigma,
        shape: GalShape::new(t.gamma, &support).unwrap(),
        v: t.v.clone(),
        s: t.s.clone(),
    }
}

fn prior(t: &Tiny) -> GaussianPrior {
    GaussianPrior::diagonal(&t.prior_mean, &t.prior_var)
}

fn sigma_prior(t: &Tiny) -> InverseGammaPrior {
    InverseGammaPrior {
        shape: t.sigma_shape,
        scale: t.sigma_scale,
    }
}

fn audit(label: &str, draws: &[f64], log_density: impl Fn(f64) -> f64, lo: f64, hi: f64, family: usize) {
    let grid = GridCdf::from_log_density(log_density, lo, hi, 40_001);
    let r = ks_one_sample(draws, |x| grid.cdf(x));
    assert!(r.p_value > LEVEL / family as f64, "{label}: {r:?}");
}

fn span(draws: &[f64], pad: f64) -> (f64, f64) {
    let lo = draws.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = draws.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo - pad, hi + pad)
}

pub fn coefficient_conditional() {
    for (k, gamma) in shapes().into_iter().enumerate() {
        let t = Tiny::new(P0, gamma);
        let st = state(&t);
        let mut rng = stream_rng(1, k as u64);
        let draws: Vec<f64> = (0..DRAWS)
            .map(|_| update_beta(&st, &t.x, &t.y, &prior(&t), &mut rng).unwrap().beta[0])
            .collect();
        let (lo, hi) = span(&draws, 1.0);
        let joint = |b: f64| {
            let mut tt = t.clone();
            tt.beta[0] = b;
            tt.log_joint()
        };
        audit(&format!("beta, gamma={gamma}"), &draws, joint, lo, hi, 3);
    }
}

pub fn exponential_latent_conditional() {
    for (k, gamma) in shapes().into_iter().enumerate() {
        let t = Tiny::new(P0, gamma);
        let st = state(&t);
        let mut rng = stream_rng(2, k as u64);
        let mut cols: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(DRAWS)).collect();
        for _ in 0..DRAWS {
            for (i, v) in update_v(&st, &t.x, &t.y, &mut rng).into_iter().enumerate() {
                cols[i].push(v.ln());
            }
        }
        for (i, col) in cols.iter().enumerate() {
            let joint = |lv: f64| {
                let mut tt = t.clone();
                tt.v[i] = lv.exp();
                tt.log_joint() + lv
            };
            let (lo, hi) = span(col, 2.0);
            audit(&format!("v_{i}, gamma={gamma}"), col, joint, lo, hi, 9);
        }
    }
}

pub fn half_normal_latent_conditional() {
    for (k, gamma) in shapes().into_iter().enumerate() {
        let t = Tiny::new(P0, gamma);
        let st = state(&t);
        let mut rng = stream_rng(3, k as u64);
        let mut cols: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(DRAWS)).collect();
        for _ in 0..DRAWS {
            for (i, s) in update_s(&st, &t.x, &t.y, &mut rng).into_iter().enumerate() {
                cols[i].push(s);
            }
        }
        for (i, col) in cols.iter().enumerate() {
            let joint = |s: f64| {
                let mut tt = t.clone();
                tt.s[i] = s;
                tt.log_joint()
            };
            let (_, hi) = span(col, 2.0);
            audit(&format!("s_{i}, gamma={gamma}"), col, joint, 1e-12, hi, 9);
        }
    }
}

pub fn scale_conditional() {
    for (k, gamma) in shapes().into_iter().enumerate() {
        let t = Tiny::new(P0, gamma);
        let st = state(&t);
        let mut rng = stream_rng(4, k as u64);
        let draws: Vec<f64> = (0..DRAWS)
            .map(|_| update_sigma(&st, &t.x, &t.y, &sigma_prior(&t), &mut rng).unwrap().ln())
            .collect();
        let joint = |ls: f64| {
            let mut tt = t.clone();
            tt.sigma = ls.exp();
            tt.log_joint() + ls
        };
        let (lo, hi) = span(&draws, 2.0);
        audit(&format!("sigma, gamma={gamma}"), &draws, joint, lo, hi, 3);
    }
}

pub fn censored_response_conditional() {
    let threshold = 0.2;
    for (k, gamma) in shapes().into_iter().enumerate() {
        let mut t = Tiny::new(P0, gamma);
        t.y[1] = threshold;
        let st = state(&t);
        let mut rng = stream_rng(5, k as u64);
        let mut y = t.y.clone();
        let draws: Vec<f64> = (0..DRAWS)
            .map(|_| {
                update_w(&st, &t.x, &[1], threshold, &mut y, &mut rng);
                y[1]
            })
            .collect();
        assert!(draws.iter().all(|&w| w <= threshold));
        let joint = |w: f64| {
            let mut tt = t.clone();
            tt.y[1] = w;
            tt.log_joint()
        };
        let (lo, _) = span(&draws, 2.0);
        audit(&format!("w, gamma={gamma}"), &draws, joint, lo, threshold, 3);
    }
}

pub fn half_normal_latent_with_exponential_integrated() {
    for (k, gamma) in shapes().into_iter().enumerate() {
        let t = Tiny::new(P0, gamma);
        let st = state(&t);
        let xb = st.linear_predictor(&t.x);
        let mut rng = stream_rng(6, k as u64);
        let mut cols: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(DRAWS)).collect();
        for _ in 0..DRAWS {
            for (i, s) in update_s_marginal(&xb, &t.y, &st.shape, t.sigma, &mut rng)
                .into_iter()
                .enumerate()
            {
                cols[i].push(s);
            }
        }
        for (i, col) in cols.iter().enumerate() {
            let target = |s: f64| -0.5 * s * s + t.log_v_integrated(i, s);
            let grid = GridSampler::new(target, 0.0, 9.0, 4001);
            let r = ks_one_sample(col, |x| grid.cdf(x));
            assert!(r.p_value > LEVEL / 9.0, "s_{i} marginal, gamma={gamma}: {r:?}");
        }
    }
}

/// Start from exact draws of the shape target, apply one Metropolis step and
/// compare the result with the same target.
fn shape_kernel_is_invariant(kind: GammaUpdate, target: impl Fn(&Tiny) -> f64, grid_points: usize, seed: u64) {
    let support = GammaSupport::new(P0).unwrap();
    let base = Tiny::new(P0, 0.0);
    let log_target = |g: f64| {
        let mut tt = base.clone();
        tt.gamma = g;
        target(&tt)
    };
    let eps = 1e-9 * support.width();
    let grid = GridSampler::new(log_target, support.lower + eps, support.upper - eps, grid_points);
    let step = GammaStep {
        support,
        prior: RescaledBetaPrior::default(),
        kind,
        step: 1.2,
    };
    let mut rng = stream_rng(7, seed);
    let mut st = state(&base);
    let mut accepted = 0;
    let draws: Vec<f64> = (0..DRAWS)
        .map(|_| {
            st.shape = GalShape::new(grid.sample(&mut rng), &support).unwrap();
            let mv = update_gamma(&st, &base.x, &base.y, &step, &mut rng);
            accepted += mv.accepted as usize;
            mv.shape.gamma
        })
        .collect();
    assert!(accepted > DRAWS / 20, "{kind:?}: {accepted} accepted");
    let r = ks_one_sample(&draws, |x| grid.cdf(x));
    assert!(r.p_value > LEVEL, "{kind:?}: {r:?}");
}

pub fn shape_step_given_both_latents() {
    shape_kernel_is_invariant(GammaUpdate::Conditional, |t| t.log_joint(), 20_001, 0);
}

pub fn shape_step_with_exponential_integrated() {
    let target = |t: &Tiny| (0..3).map(|i| t.log_v_integrated(i, t.s[i])).sum::<f64>();
    shape_kernel_is_invariant(GammaUpdate::Collapsed, target, 2001, 1);
}

pub fn shape_step_with_both_latents_integrated() {
    let target = |t: &Tiny| (0..3).map(|i| t.log_sv_integrated(i)).sum::<f64>();
    shape_kernel_is_invariant(GammaUpdate::Marginal, target, 401, 2);
}

pub fn shape_scale_moves_leave_posterior_invariant() {
    let support = GammaSupport::new(P0).unwrap();
    let t = Tiny::new(P0, 0.0);
    let xb = DVector::from_fn(3, |i, _| t.xb(i));
    let prior_gamma = RescaledBetaPrior::default();
    let prior_sigma = sigma_prior(&t);
    let target = ShapeScaleTarget {
        xb: &xb,
        y: &t.y,
        support: &support,
        prior_gamma: &prior_gamma,
        prior_sigma: &prior_sigma,
    };
    // density of (u, ln sigma) with u = (gamma - L) / (U - L)
    let log_density = |u: f64, ls: f64| {
        let gamma = support.from_unit(u);
        let sigma = ls.exp();
        let ll: f64 = (0..3)
            .map(|i| gal_logpdf_quadrature(t.y[i], gamma, P0, xb[i], sigma))
            .sum();
        ll - (t.sigma_shape + 1.0) * ls - t.sigma_scale / sigma + ls
    };
    let grid = Grid2Sampler::new(log_density, (0.0, 1.0, 160), (-3.5, 3.0, 160));
    let (cdf_u, cdf_ls) = grid.marginal_cdfs();
    for (k, (kind, step)) in [
        (ShapeScaleKind::Gamma, 1.5),
        (ShapeScaleKind::Sigma, 0.8),
        (ShapeScaleKind::Joint, 1.5),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = stream_rng(8, k as u64);
        let mut us = Vec::with_capacity(DRAWS);
        let mut lss = Vec::with_capacity(DRAWS);
        let mut accepted = 0;
        for _ in 0..DRAWS {
            let (u, ls) = grid.sample(&mut rng);
            let shape = GalShape::new(support.from_unit(u), &support).unwrap();
            let current = target.log_density(&shape, ls.exp());
            let mv = shape_scale_move(kind, &target, shape, ls.exp(), current, step, &mut rng);
            accepted += mv.accepted as usize;
            us.push(support.to_unit(mv.shape.gamma));
            lss.push(mv.sigma.ln());
        }
        assert!(accepted > DRAWS / 20, "{kind:?}: {accepted} accepted");
        let ru = ks_one_sample(&us, |x| knot_cdf(&cdf_u, x));
        let rs = ks_one_sample(&lss, |x| knot_cdf(&cdf_ls, x));
        assert!(
            ru.p_value > LEVEL / 6.0 && rs.p_value > LEVEL / 6.0,
            "{kind:?}: {ru:?} {rs:?}"
        );
    }
}
