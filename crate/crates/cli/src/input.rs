//! CSV input: a header row followed by numeric rows.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use galqr_core::Dataset;
use nalgebra::{DMatrix, DVector};

use crate::config::DataSpec;

/// Numeric table read column by column.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Self::from_reader(file).with_context(|| format!("reading {}", path.display()))
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if headers.is_empty() || headers.iter().any(String::is_empty) {
            bail!("header row has empty column names");
        }
        for (i, h) in headers.iter().enumerate() {
            if headers[..i].contains(h) {
                bail!("duplicate column {h:?}");
            }
        }
        let mut columns = vec![Vec::new(); headers.len()];
        for (r, rec) in rdr.records().enumerate() {
            let row = r + 2;
            let rec = rec.with_context(|| format!("row {row}"))?;
            if rec.len() != headers.len() {
                bail!("row {row}: {} fields, header has {}", rec.len(), headers.len());
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| anyhow!("row {row}, column {:?}: {field:?} is not a number", headers[j]))?;
                if !v.is_finite() {
                    bail!("row {row}, column {:?}: non-finite value {field:?}", headers[j]);
                }
                columns[j].push(v);
            }
        }
        if columns[0].is_empty() {
            bail!("no data rows");
        }
        Ok(Self { headers, columns })
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|j| self.columns[j].as_slice())
            .ok_or_else(|| anyhow!("missing column {name:?} (have {:?})", self.headers))
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }
}

/// Covariate names in design order (after the intercept).
pub fn covariate_names(table: &Table, spec: &DataSpec) -> Vec<String> {
    let mut names: Vec<String> = match &spec.covariates {
        Some(c) => c.clone(),
        None => table
            .headers
            .iter()
            .filter(|h| **h != spec.response && Some(*h) != spec.censored.as_ref())
            .cloned()
            .collect(),
    };
    names.extend(spec.transforms.iter().map(|t| t.name.clone()));
    names
}

/// Build the dataset described by `spec`, applying transforms and censoring.
pub fn build_dataset(table: &Table, spec: &DataSpec) -> Result<Dataset> {
    let n = table.n_rows();
    let y = DVector::from_column_slice(table.column(&spec.response)?);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let base: Vec<String> = match &spec.covariates {
        Some(c) => c.clone(),
        None => covariate_names(
            table,
            &DataSpec {
                transforms: Vec::new(),
                ..spec.clone()
            },
        ),
    };
    for name in &base {
        if *name == spec.response {
            bail!("response column {name:?} listed as a covariate");
        }
        cols.push(table.column(name)?.to_vec());
    }
    for t in &spec.transforms {
        let src = table.column(&t.column)?;
        let vals: Vec<f64> = src.iter().map(|v| v.powf(t.power)).collect();
        if let Some(r) = vals.iter().position(|v| !v.is_finite()) {
            bail!(
                "transform {:?}: {}^{} is not finite at row {}",
                t.name,
                t.column,
                t.power,
                r + 2
            );
        }
        cols.push(vals);
    }
    let cov = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let data = Dataset::from_covariates(&cov, y)?;
    match &spec.censored {
        None => Ok(data),
        Some(name) => {
            let flags = table
                .column(name)?
                .iter()
                .enumerate()
                .map(|(i, &v)| match v {
                    0.0 => Ok(false),
                    1.0 => Ok(true),
                    _ => Err(anyhow!("row {}, column {name:?}: censoring flag must be 0 or 1", i + 2)),
                })
                .collect::<Result<Vec<bool>>>()?;
            Ok(data.with_censoring(flags, spec.threshold)?)
        }
    }
}
