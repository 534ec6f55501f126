//! Model comparison and predictive accuracy: check loss, mean check loss,
//! correct inclusion/exclusion score, posterior predictive loss under
//! quadratic and check loss, and BIC with its censored-data revision.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{domain, Error, Result};
use crate::gal::{gal_cdf, gal_logpdf, GalParams};
use crate::sampler::{standardized_effects, ErrorModel, PosteriorSamples};

/// Standardized-effect magnitude above which a covariate counts as included.
pub const CIE_THRESHOLD: f64 = 0.1;

/// `rho_p(u) = u (p - I(u < 0))`.
pub fn check_loss(u: f64, p0: f64) -> f64 {
    crate::gal::rho(u, p0)
}

fn check_p0(p0: f64) -> Result<()> {
    if p0 > 0.0 && p0 < 1.0 {
        Ok(())
    } else {
        domain(format!("p0 must lie in (0, 1), got {p0}"))
    }
}

/// `N^-1 sum rho_p0(x_i'beta_hat - x_i'beta_true)` over the rows of `test_x`.
pub fn mean_check_loss(beta_hat: &[f64], beta_true: &[f64], test_x: &DMatrix<f64>, p0: f64) -> Result<f64> {
    check_p0(p0)?;
    let p = test_x.ncols();
    if beta_hat.len() != p || beta_true.len() != p {
        return Err(Error::Data(format!(
            "coefficient lengths {} and {} do not match {p} design columns",
            beta_hat.len(),
            beta_true.len()
        )));
    }
    if test_x.nrows() == 0 {
        return Err(Error::Data("mean check loss needs at least one test row".into()));
    }
    let diff = DVector::from_iterator(p, beta_hat.iter().zip(beta_true).map(|(h, t)| h - t));
    let u = test_x * diff;
    Ok(u.iter().map(|&ui| check_loss(ui, p0)).sum::<f64>() / test_x.nrows() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CieReport {
    /// Per draw and slope: `|beta_j*| > threshold`.
    pub inclusion: Vec<Vec<bool>>,
    /// Per draw: fraction of slopes classified correctly.
    pub per_draw: Vec<f64>,
    pub mean: f64,
    pub threshold: f64,
}

/// Correct inclusions and exclusions among the slopes, per draw, divided by
/// the number of slopes. `beta_draws` rows and `true_beta` include the
/// intercept in position 0; a slope is truly active when nonzero.
pub fn cie_score(beta_draws: &[Vec<f64>], data: &Dataset, true_beta: &[f64]) -> Result<CieReport> {
    if beta_draws.is_empty() {
        return Err(Error::Data("CIE needs at least one draw".into()));
    }
    let d = data.p() - 1;
    if d == 0 || true_beta.len() != data.p() || beta_draws.iter().any(|b| b.len() != data.p()) {
        return Err(Error::Data(format!(
            "CIE needs coefficient vectors of length {} with at least one slope",
            data.p()
        )));
    }
    let effects = standardized_effects(beta_draws, data)?;
    let active: Vec<bool> = true_beta[1..].iter().map(|&b| b != 0.0).collect();
    let inclusion: Vec<Vec<bool>> = effects
        .iter()
        .map(|e| e.iter().map(|v| v.abs() > CIE_THRESHOLD).collect())
        .collect();
    let per_draw: Vec<f64> = inclusion
        .iter()
        .map(|inc| inc.iter().zip(&active).filter(|(a, b)| a == b).count() as f64 / d as f64)
        .collect();
    let mean = per_draw.iter().sum::<f64>() / per_draw.len() as f64;
    Ok(CieReport {
        inclusion,
        per_draw,
        mean,
        threshold: CIE_THRESHOLD,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Quadratic,
    Check,
}

/// Posterior predictive loss `D = P + weight * G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PplReport {
    pub penalty: f64,
    pub fit: f64,
    pub criterion: f64,
    pub loss_kind: LossKind,
    /// `m` of the quadratic criterion (infinite for `D_inf`); unused for check
    /// loss.
    pub m_weight: Option<f64>,
}

fn check_replicates(replicates: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if replicates.nrows() == 0 || replicates.ncols() == 0 {
        return Err(Error::Data("replicate matrix is empty".into()));
    }
    if replicates.ncols() != y.len() {
        return Err(Error::Data(format!(
            "replicates have {} columns for {} responses",
            replicates.ncols(),
            y.len()
        )));
    }
    Ok(())
}

/// `G = sum (y_i - E y*_i)^2`, `P = sum var(y*_i)` and
/// `D = P + m / (m + 1) G`. Replicates are `draws x n`.
pub fn ppl_quadratic(replicates: &DMatrix<f64>, y: &DVector<f64>, m_weight: f64) -> Result<PplReport> {
    check_replicates(replicates, y)?;
    if !(m_weight >= 0.0) {
        return domain(format!("m_weight must be nonnegative, got {m_weight}"));
    }
    let t = replicates.nrows() as f64;
    let (mut pen, mut fit) = (0.0, 0.0);
    for (i, col) in replicates.column_iter().enumerate() {
        let mean = col.sum() / t;
        pen += col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t;
        fit += (y[i] - mean).powi(2);
    }
    let weight = if m_weight.is_infinite() {
        1.0
    } else {
        m_weight / (m_weight + 1.0)
    };
    Ok(PplReport {
        penalty: pen,
        fit,
        criterion: pen + weight * fit,
        loss_kind: LossKind::Quadratic,
        m_weight: Some(m_weight),
    })
}

/// `D = sum E rho(y_i - y*_i)`, `G = sum rho(y_i - E y*_i)`, `P = D - G`.
/// With `rho(u) = p u + max(-u, 0)` the linear part cancels in `P`, which is
/// computed as `sum E max(y*_i - y_i, 0) - max(E y*_i - y_i, 0)`.
pub fn ppl_check(replicates: &DMatrix<f64>, y: &DVector<f64>, p0: f64) -> Result<PplReport> {
    check_replicates(replicates, y)?;
    check_p0(p0)?;
    let t = replicates.nrows() as f64;
    let (mut penalty, mut fit) = (0.0, 0.0);
    for (i, col) in replicates.column_iter().enumerate() {
        // both sums run over the same deviations, so the penalty term is
        // nonnegative in floating point as well
        let dev: Vec<f64> = col.iter().map(|&v| v - y[i]).collect();
        let mean_dev = dev.iter().sum::<f64>() / t;
        let hinge = dev.iter().map(|d| d.max(0.0)).sum::<f64>() / t;
        penalty += hinge - mean_dev.max(0.0);
        fit += check_loss(-mean_dev, p0);
    }
    Ok(PplReport {
        penalty,
        fit,
        criterion: fit + penalty,
        loss_kind: LossKind::Check,
        m_weight: None,
    })
}

/// `-2 loglik + k ln n`.
pub fn bic(loglik: f64, k_params: usize, n_obs: usize) -> f64 {
    -2.0 * loglik + k_params as f64 * (n_obs as f64).ln()
}

/// BIC with the penalty counted on uncensored observations only.
pub fn bic_censored(loglik: f64, k_params: usize, n_uncensored: usize) -> f64 {
    bic(loglik, k_params, n_uncensored)
}

/// Log-likelihood of GAL errors at `(beta, sigma, gamma)`: log densities for
/// observed rows and `ln F(c)` for censored rows.
pub fn gal_loglik(data: &Dataset, beta: &[f64], sigma: f64, gamma: f64, p0: f64) -> Result<f64> {
    if beta.len() != data.p() {
        return Err(Error::Data(format!(
            "{} coefficients for a design with {} columns",
            beta.len(),
            data.p()
        )));
    }
    let xb = &data.x * DVector::from_column_slice(beta);
    let mut ll = 0.0;
    for i in 0..data.n() {
        let params = GalParams::new(p0, gamma, xb[i], sigma)?;
        ll += if data.is_censored(i) {
            gal_cdf(data.threshold, &params).ln()
        } else {
            gal_logpdf(data.y[i], &params)
        };
    }
    Ok(ll)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BicReport {
    pub model: String,
    pub loglik: f64,
    pub k_params: usize,
    /// Observations entering the penalty (uncensored rows).
    pub n_obs: usize,
    pub bic: f64,
}

/// BIC with the likelihood evaluated at the posterior means of
/// `(beta, sigma, gamma)`. Counts one parameter per coefficient plus `sigma`,
/// plus `gamma` for GAL fits.
pub fn bic_at_posterior_mean(samples: &PosteriorSamples, data: &Dataset) -> Result<BicReport> {
    if samples.is_empty() {
        return Err(Error::Data("no posterior draws".into()));
    }
    let model = samples.config.model;
    let gamma = match model {
        ErrorModel::Al => 0.0,
        ErrorModel::Gal => samples.gamma_mean(),
    };
    let loglik = gal_loglik(data, &samples.beta_mean(), samples.sigma_mean(), gamma, samples.p0())?;
    let k = samples.n_coef() + 1 + usize::from(model == ErrorModel::Gal);
    let n = data.n_uncensored();
    Ok(BicReport {
        model: model.label().to_string(),
        loglik,
        k_params: k,
        n_obs: n,
        bic: bic_censored(loglik, k, n),
    })
}

/// One line of a flat criterion report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub p0: f64,
    pub criterion: String,
    pub value: f64,
}

impl ReportRow {
    pub fn new(model: impl Into<String>, p0: f64, criterion: impl Into<String>, value: f64) -> Self {
        Self {
            model: model.into(),
            p0,
            criterion: criterion.into(),
            value,
        }
    }
}

/// Rows for a predictive-loss report: `ppl_<kind>_{P,G,D}`.
pub fn ppl_rows(model: &str, p0: f64, report: &PplReport) -> Vec<ReportRow> {
    let kind = match report.loss_kind {
        LossKind::Quadratic => "quadratic",
        LossKind::Check => "check",
    };
    vec![
        ReportRow::new(model, p0, format!("ppl_{kind}_P"), report.penalty),
        ReportRow::new(model, p0, format!("ppl_{kind}_G"), report.fit),
        ReportRow::new(model, p0, format!("ppl_{kind}_D"), report.criterion),
    ]
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
