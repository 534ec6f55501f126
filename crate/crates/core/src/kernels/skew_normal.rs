use crate::special::{std_normal_logcdf, std_normal_logpdf};

/// Skew-normal log density `ln[2/omega phi(z) Phi(lambda z)]`, `z = (y - xi)/omega`.
pub fn skew_normal_logpdf(y: f64, xi: f64, omega: f64, lambda: f64) -> f64 {
    debug_assert!(omega > 0.0);
    let z = (y - xi) / omega;
    std::f64::consts::LN_2 - omega.ln() + std_normal_logpdf(z) + std_normal_logcdf(lambda * z)
}

pub fn skew_normal_pdf(y: f64, xi: f64, omega: f64, lambda: f64) -> f64 {
    skew_normal_logpdf(y, xi, omega, lambda).exp()
}
