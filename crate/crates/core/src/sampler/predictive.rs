use nalgebra::DMatrix;
use rand::Rng;

use super::chain::PosteriorSamples;
use crate::error::{Error, Result};
use crate::gal::{gal_pdf, gal_sample, GalParams};

/// Points in the default density grid.
pub const GRID_POINTS: usize = 512;
/// Half-width of the default grid in units of the posterior mean of `sigma`.
pub const GRID_HALF_WIDTH: f64 = 8.0;

/// Evenly spaced grid on `[center - 8 sigma_hat, center + 8 sigma_hat]`.
pub fn default_grid(center: f64, sigma_hat: f64) -> Vec<f64> {
    let lo = center - GRID_HALF_WIDTH * sigma_hat;
    let h = 2.0 * GRID_HALF_WIDTH * sigma_hat / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(|i| lo + h * i as f64).collect()
}

fn draw_params(samples: &PosteriorSamples, t: usize, mu: f64) -> Result<GalParams> {
    GalParams::with_support(samples.gamma[t], mu, samples.sigma[t], &samples.support)
}

/// Posterior predictive error density on `grid`: the average over posterior
/// `(gamma, sigma)` draws of `f_p0(eps | gamma, 0, sigma)`. At most
/// `mc_draws` draws are used, chosen at random without replacement.
pub fn predictive_error_density<R: Rng + ?Sized>(
    samples: &PosteriorSamples,
    grid: &[f64],
    mc_draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::Data("no posterior draws".into()));
    }
    let idx: Vec<usize> = if mc_draws >= samples.len() {
        (0..samples.len()).collect()
    } else {
        rand::seq::index::sample(rng, samples.len(), mc_draws.max(1)).into_vec()
    };
    let mut dens = vec![0.0; grid.len()];
    for &t in &idx {
        let params = draw_params(samples, t, 0.0)?;
        for (d, &e) in dens.iter_mut().zip(grid) {
            *d += gal_pdf(e, &params);
        }
    }
    let m = idx.len() as f64;
    dens.iter_mut().for_each(|d| *d /= m);
    Ok(dens)
}

/// Replicated responses, one row per posterior draw and one column per row
/// of `x`, generated through the hierarchical mixture.
pub fn posterior_predictive_replicates<R: Rng + ?Sized>(
    samples: &PosteriorSamples,
    x: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if x.ncols() != samples.n_coef() {
        return Err(Error::Data(format!(
            "design has {} columns, draws have {} coefficients",
            x.ncols(),
            samples.n_coef()
        )));
    }
    let n = x.nrows();
    let mut out = DMatrix::zeros(samples.len(), n);
    for t in 0..samples.len() {
        let beta = &samples.beta[t];
        let base = draw_params(samples, t, 0.0)?;
        for i in 0..n {
            let mu: f64 = (0..beta.len()).map(|j| x[(i, j)] * beta[j]).sum();
            let params = GalParams { mu, ..base };
            out[(t, i)] = gal_sample(&params, rng);
        }
    }
    Ok(out)
}

/// Apply left-censoring at `threshold` to replicated responses.
pub fn censor_replicates(replicates: &mut DMatrix<f64>, threshold: f64) {
    replicates.apply(|v| *v = v.max(threshold));
}
