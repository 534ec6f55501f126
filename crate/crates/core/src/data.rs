//! Regression data: design matrix with a leading intercept column, responses,
//! and optional left-censoring.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Dataset {
    /// `n x (d + 1)` design; column 0 is the intercept.
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Empty, or one flag per row. Censored rows carry `y = threshold`.
    pub censored: Vec<bool>,
    pub threshold: f64,
}

impl Dataset {
    /// Build from covariates (without intercept); a column of ones is
    /// prepended.
    pub fn from_covariates(covariates: &DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let n = covariates.nrows();
        let mut x = DMatrix::from_element(n, covariates.ncols() + 1, 1.0);
        x.columns_mut(1, covariates.ncols()).copy_from(covariates);
        Self::new(x, y)
    }

    /// Build from a full design whose first column must be all ones.
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Data(format!(
                "design has {} rows but response has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() == 0 {
            return Err(Error::Data("design has no columns".into()));
        }
        if let Some(i) = (0..x.nrows()).find(|&i| x[(i, 0)] != 1.0) {
            return Err(Error::Data(format!("row {i}: intercept column must be 1")));
        }
        for (i, row) in x.row_iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!("row {i}, column {j}: non-finite covariate")));
            }
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("row {i}: non-finite response")));
        }
        Ok(Self {
            x,
            y,
            censored: Vec::new(),
            threshold: 0.0,
        })
    }

    /// Mark rows as left-censored at `threshold`. Censored responses are set
    /// to the threshold; observed ones must lie strictly above it.
    pub fn with_censoring(mut self, censored: Vec<bool>, threshold: f64) -> Result<Self> {
        if censored.len() != self.n() {
            return Err(Error::Data(format!(
                "{} censoring flags for {} rows",
                censored.len(),
                self.n()
            )));
        }
        if !threshold.is_finite() {
            return Err(Error::Data("censoring threshold must be finite".into()));
        }
        for (i, &c) in censored.iter().enumerate() {
            if c {
                self.y[i] = threshold;
            } else if self.y[i] <= threshold {
                return Err(Error::Data(format!(
                    "row {i}: observed response {} is not above the threshold {threshold}",
                    self.y[i]
                )));
            }
        }
        self.censored = censored;
        self.threshold = threshold;
        Ok(self)
    }

    /// Left-censor at `threshold`: every response at or below it becomes
    /// censored.
    pub fn censor_below(self, threshold: f64) -> Result<Self> {
        let flags = self.y.iter().map(|&v| v <= threshold).collect();
        self.with_censoring(flags, threshold)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of coefficients including the intercept.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_censored(&self, i: usize) -> bool {
        self.censored.get(i).copied().unwrap_or(false)
    }

    pub fn n_censored(&self) -> usize {
        self.censored.iter().filter(|&&c| c).count()
    }

    pub fn n_uncensored(&self) -> usize {
        self.n() - self.n_censored()
    }

    pub fn censored_rows(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.is_censored(i)).collect()
    }

    /// Sample standard deviation of covariate column `j` (1-based over
    /// covariates, i.e. design column `j`).
    pub fn covariate_sd(&self, j: usize) -> f64 {
        sample_sd(self.x.column(j).iter().copied())
    }

    pub fn response_sd(&self) -> f64 {
        sample_sd(self.y.iter().copied())
    }

    /// Select rows, keeping censoring flags.
    pub fn subset(&self, rows: &[usize]) -> Self {
        let x = self.x.select_rows(rows);
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.y[i]));
        let censored = if self.censored.is_empty() {
            Vec::new()
        } else {
            rows.iter().map(|&i| self.censored[i]).collect()
        };
        Self {
            x,
            y,
            censored,
            threshold: self.threshold,
        }
    }
}

pub(crate) fn sample_sd(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    (xs.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Centering and scaling of the covariate columns (the intercept column is
/// left alone).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let d = data.p() - 1;
        let mut means = Vec::with_capacity(d);
        let mut sds = Vec::with_capacity(d);
        for j in 1..data.p() {
            let col = data.x.column(j);
            let sd = sample_sd(col.iter().copied());
            if !(sd > 0.0) {
                return Err(Error::Data(format!("covariate column {j} has zero variance")));
            }
            means.push(col.mean());
            sds.push(sd);
        }
        Ok(Self { means, sds })
    }

    pub fn apply(&self, data: &Dataset) -> Dataset {
        let mut out = data.clone();
        for (k, (m, s)) in self.means.iter().zip(&self.sds).enumerate() {
            out.x.column_mut(k + 1).apply(|v| *v = (*v - m) / s);
        }
        out
    }

    /// Map coefficients fitted on the standardized design back to the
    /// original covariate scale.
    pub fn back_transform(&self, beta_std: &[f64]) -> Vec<f64> {
        let mut beta = beta_std.to_vec();
        for k in 0..self.means.len() {
            beta[k + 1] = beta_std[k + 1] / self.sds[k];
            beta[0] -= beta[k + 1] * self.means[k];
        }
        beta
    }
}
