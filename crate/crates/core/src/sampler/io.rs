//! Posterior samples on disk: a CSV with one row per retained draw
//! (`beta_0 .. beta_d, sigma, gamma[, omega_1 .. omega_d, eta2]`) and a JSON
//! sidecar holding the configuration, seed, iteration indices and
//! diagnostics.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chain::{ChainDiagnostics, PosteriorSamples};
use super::config::QuantRegConfig;
use crate::data::Standardizer;
use crate::error::{Error, Result};
use crate::gal::GammaSupport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetadata {
    pub format_version: u32,
    pub p0: f64,
    pub model: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub iterations: Vec<usize>,
    pub support: GammaSupport,
    pub standardizer: Option<Standardizer>,
    pub diagnostics: ChainDiagnostics,
    pub config: QuantRegConfig,
}

pub const FORMAT_VERSION: u32 = 1;

impl PosteriorSamples {
    pub fn metadata(&self) -> SampleMetadata {
        SampleMetadata {
            format_version: FORMAT_VERSION,
            p0: self.config.p0,
            model: self.config.model.label().to_string(),
            seed: self.config.chain.seed,
            columns: self.column_names(),
            iterations: self.iterations.clone(),
            support: self.support,
            standardizer: self.standardizer.clone(),
            diagnostics: self.diagnostics.clone(),
            config: self.config.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.column_names())?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write `samples.csv` and `samples.meta.json` style pair.
    pub fn save(&self, csv_path: &Path, meta_path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(csv_path)?)?;
        let meta = serde_json::to_string_pretty(&self.metadata())?;
        std::fs::write(meta_path, meta + "\n")?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, meta: SampleMetadata) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if headers != meta.columns {
            return Err(Error::Data(format!(
                "sample columns {headers:?} do not match metadata {:?}",
                meta.columns
            )));
        }
        let col = |name: &str| headers.iter().position(|h| h == name);
        let n_beta = headers.iter().filter(|h| h.starts_with("beta_")).count();
        let n_omega = headers.iter().filter(|h| h.starts_with("omega_")).count();
        let (i_sigma, i_gamma) = match (col("sigma"), col("gamma")) {
            (Some(s), Some(g)) => (s, g),
            _ => return Err(Error::Data("samples need sigma and gamma columns".into())),
        };
        let i_eta = col("eta2");
        let mut out = PosteriorSamples {
            config: meta.config.clone(),
            support: meta.support,
            iterations: meta.iterations.clone(),
            beta: Vec::new(),
            sigma: Vec::new(),
            gamma: Vec::new(),
            omega: (n_omega > 0).then(Vec::new),
            eta2: i_eta.map(|_| Vec::new()),
            standardizer: meta.standardizer.clone(),
            diagnostics: meta.diagnostics.clone(),
        };
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::Data(format!(
                            "samples row {}, column {}: bad number {s:?}",
                            line + 2,
                            headers[j]
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            out.beta.push(
                (0..n_beta)
                    .map(|j| vals[col(&format!("beta_{j}")).expect("beta column")])
                    .collect(),
            );
            out.sigma.push(vals[i_sigma]);
            out.gamma.push(vals[i_gamma]);
            if let Some(om) = out.omega.as_mut() {
                om.push(
                    (1..=n_omega)
                        .map(|k| vals[col(&format!("omega_{k}")).expect("omega column")])
                        .collect(),
                );
            }
            if let (Some(e), Some(i)) = (out.eta2.as_mut(), i_eta) {
                e.push(vals[i]);
            }
        }
        if out.iterations.len() != out.len() {
            return Err(Error::Data(format!(
                "{} draws but {} iteration indices in metadata",
                out.len(),
                out.iterations.len()
            )));
        }
        Ok(out)
    }

    pub fn load(csv_path: &Path, meta_path: &Path) -> Result<Self> {
        let meta: SampleMetadata = serde_json::from_str(&std::fs::read_to_string(meta_path)?)?;
        Self::read_csv(std::fs::File::open(csv_path)?, meta)
    }
}
