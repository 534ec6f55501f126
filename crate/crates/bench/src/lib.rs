//! Fixtures shared by the benchmarks.

use galqr_core::rng::stream_rng;
use galqr_core::sampler::ChainConfig;
use galqr_core::sim::make_design;
use galqr_core::{Dataset, ErrorModel, QuantRegConfig, Result};
use nalgebra::DVector;
use rand::Rng;

/// Regression data with an AR(1) design and standard normal noise.
pub fn bench_dataset(n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = stream_rng(seed, 0);
    let x = make_design(n, &mut rng);
    let y = DVector::from_fn(n, |i, _| {
        let signal: f64 = x.row(i).iter().enumerate().map(|(j, v)| v / (j + 1) as f64).sum();
        signal + rng.random::<f64>() - 0.5
    });
    Dataset::from_covariates(&x, y)
}

/// A short chain with a single burn-in step and no thinning, so run time is
/// proportional to `iterations`.
pub fn bench_config(p0: f64, model: ErrorModel, iterations: usize) -> QuantRegConfig {
    let mut cfg = QuantRegConfig::new(p0, model);
    cfg.chain = ChainConfig {
        burn_in: 1,
        thin: 1,
        keep: iterations,
        ..ChainConfig::default()
    };
    cfg
}
