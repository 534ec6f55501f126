//! Latent responses for left-censored rows.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::updates::ChainState;
use crate::kernels::sample_truncnorm_below;

/// Mean and variance of the normal whose truncation to `(-inf, c]` is the
/// conditional of the latent response of row `i`:
/// `N(x_i'beta + sigma alpha s_i + A v_i, sigma B v_i)`.
pub fn w_conditional(state: &ChainState, xb_i: f64, i: usize) -> (f64, f64) {
    let sh = &state.shape;
    let mean = xb_i + state.sigma * sh.alpha * state.s[i] + sh.a * state.v[i];
    (mean, state.sigma * sh.b * state.v[i])
}

/// Redraw the latent responses of `rows` (the censored rows) into `y`.
pub fn update_w<R: Rng + ?Sized>(
    state: &ChainState,
    x: &DMatrix<f64>,
    rows: &[usize],
    threshold: f64,
    y: &mut DVector<f64>,
    rng: &mut R,
) {
    for &i in rows {
        let xb_i = x.row(i).dot(&state.beta.transpose());
        let (mean, var) = w_conditional(state, xb_i, i);
        y[i] = sample_truncnorm_below(mean, var, threshold, rng);
    }
}
