use crate::error::{domain, Result};
use crate::special::{std_normal_cdf, std_normal_logcdf, std_normal_logpdf};

fn standardize(x: f64, mean: f64, variance: f64) -> Result<(f64, f64)> {
    if !(variance > 0.0) || !variance.is_finite() {
        return domain(format!("normal variance must be positive, got {variance}"));
    }
    let sd = variance.sqrt();
    Ok(((x - mean) / sd, sd))
}

pub fn normal_logpdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    let (z, sd) = standardize(x, mean, variance)?;
    Ok(std_normal_logpdf(z) - sd.ln())
}

pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    normal_logpdf(x, mean, variance).map(f64::exp)
}

pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    let (z, _) = standardize(x, mean, variance)?;
    Ok(std_normal_cdf(z))
}

/// Log CDF; stays finite far into the lower tail.
pub fn normal_logcdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    let (z, _) = standardize(x, mean, variance)?;
    Ok(std_normal_logcdf(z))
}
