use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use galqr_core::assess::{
    bic, bic_at_posterior_mean, cie_score, mean_check_loss, ppl_check, ppl_quadratic, ppl_rows, write_report_csv,
    ReportRow,
};
use galqr_core::rng::stream_rng;
use galqr_core::sampler::{
    censor_replicates, default_grid, fit, posterior_predictive_replicates, predictive_error_density, ErrorModel,
    LassoPriorConfig, PosteriorSamples, SampleMetadata,
};
use galqr_core::sim::{run_scenario, SimScenario};
use galqr_core::Dataset;

use crate::config::{DataSpec, FitFile};
use crate::input::{build_dataset, covariate_names, Table};
use crate::manifest::RunManifest;

pub const SAMPLES_FILE: &str = "samples.csv";
pub const META_FILE: &str = "samples.meta.json";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.toml";

#[derive(Debug, Parser)]
#[command(name = "galqr", version, about = "Bayesian quantile regression with GAL errors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a quantile regression to a CSV file.
    Fit(FitArgs),
    /// Run a simulation scenario.
    Simulate(SimulateArgs),
    /// Compute BIC and predictive criteria for a fitted model.
    Assess(AssessArgs),
    /// BIC from a log-likelihood, parameter count and sample size.
    Bic(BicArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Simulate(_) => "simulate",
            Command::Assess(_) => "assess",
            Command::Bic(_) => "bic",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Al,
    Gal,
}

impl From<ModelArg> for ErrorModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Al => ErrorModel::Al,
            ModelArg::Gal => ErrorModel::Gal,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Use the hierarchical Laplace prior on the slopes.
    #[arg(long)]
    pub lasso: bool,
    /// Treat the `censored` column (or the configured one) as left-censoring
    /// flags.
    #[arg(long)]
    pub tobit: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// 100 replicates, burn-in 50,000, thin 20, keep 5,000.
    #[arg(long)]
    pub paper_scale: bool,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    /// Posterior sample CSV written by `fit`; its metadata sidecar is read
    /// from the same directory.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Fit configuration; defaults to the resolved copy next to the samples.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight `m` of the quadratic predictive loss (default: infinite).
    #[arg(long)]
    pub m_weight: Option<f64>,
    /// Comma-separated true coefficients (intercept first) for CIE and MCL.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub true_beta: Option<Vec<f64>>,
    /// Held-out CSV with the same columns, for the mean check loss.
    #[arg(long)]
    pub test_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BicArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub loglik: f64,
    #[arg(long)]
    pub k: usize,
    /// Observations in the penalty (uncensored count for censored data).
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Execute a parsed command. `args` are the raw arguments after the program
/// name, recorded in manifests.
pub fn run(cli: Cli, args: &[String]) -> Result<()> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a, args),
        Command::Simulate(a) => cmd_simulate(&a, args),
        Command::Assess(a) => cmd_assess(&a, args),
        Command::Bic(a) => {
            let v = bic(a.loglik, a.k, a.n);
            println!("{v:.4}\t{}", v.round());
            Ok(())
        }
        Command::Replay(a) => cmd_replay(&a),
    }
}

fn create_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn manifest(
    command: &str,
    config: Option<&Path>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: u64,
    start: Instant,
    args: &[String],
) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.into(),
        config: config.map(Path::to_path_buf),
        inputs,
        outputs,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        args: args.to_vec(),
        cwd: std::env::current_dir()?,
    })
}

/// Resolve the fit configuration from the file and the command-line
/// overrides.
pub fn resolve_fit_config(a: &FitArgs) -> Result<FitFile> {
    let mut cfg = match &a.config {
        Some(path) => FitFile::load(path)?,
        None => FitFile::from_p0(a.p0)?,
    };
    if let Some(p0) = a.p0 {
        cfg.model.p0 = p0;
    }
    if let Some(m) = a.model {
        cfg.model.model = m.into();
    }
    if let Some(seed) = a.seed {
        cfg.model.chain.seed = seed;
    }
    if a.lasso && cfg.model.lasso.is_none() {
        cfg.model.lasso = Some(LassoPriorConfig::default());
    }
    if a.tobit && cfg.data.censored.is_none() {
        cfg.data.censored = Some("censored".into());
    }
    cfg.model.validate()?;
    Ok(cfg)
}

fn write_summary(samples: &PosteriorSamples, names: &[String], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["parameter", "term", "mean", "sd", "q025", "q50", "q975", "ess"])?;
    for s in samples.summary() {
        let term = match s.name.strip_prefix("beta_").and_then(|j| j.parse::<usize>().ok()) {
            Some(0) => "(intercept)".to_string(),
            Some(j) => names.get(j - 1).cloned().unwrap_or_default(),
            None => String::new(),
        };
        w.write_record([
            s.name.clone(),
            term,
            s.mean.to_string(),
            s.sd.to_string(),
            s.q025.to_string(),
            s.q50.to_string(),
            s.q975.to_string(),
            s.ess.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_fit(a: &FitArgs, args: &[String]) -> Result<()> {
    let start = Instant::now();
    let cfg = resolve_fit_config(a)?;
    let table = Table::read(&a.data)?;
    let data = build_dataset(&table, &cfg.data)?;
    let names = covariate_names(&table, &cfg.data);
    let samples = fit(&data, &cfg.model)?;

    create_out_dir(&a.out)?;
    let samples_path = a.out.join(SAMPLES_FILE);
    let meta_path = a.out.join(META_FILE);
    samples.save(&samples_path, &meta_path)?;
    let summary_path = a.out.join("summary.csv");
    write_summary(&samples, &names, &summary_path)?;

    let grid = default_grid(0.0, samples.sigma_mean());
    let mut rng = stream_rng(cfg.model.chain.seed, 1);
    let dens = predictive_error_density(&samples, &grid, cfg.output.density_draws, &mut rng)?;
    let density_path = a.out.join("density.csv");
    let mut w = csv::Writer::from_path(&density_path)?;
    w.write_record(["error", "density"])?;
    for (e, d) in grid.iter().zip(&dens) {
        w.write_record([e.to_string(), d.to_string()])?;
    }
    w.flush()?;
    let resolved_path = a.out.join(RESOLVED_CONFIG_FILE);
    std::fs::write(&resolved_path, toml::to_string(&cfg)?)?;

    println!(
        "{} fit, p0 = {}, n = {} ({} censored), {} draws",
        cfg.model.model.label(),
        cfg.model.p0,
        data.n(),
        data.n_censored(),
        samples.len()
    );
    println!(
        "{:<10}{:>14}{:>12}{:>12}{:>12}{:>10}  term",
        "parameter", "mean", "sd", "2.5%", "97.5%", "ess"
    );
    for s in samples.summary() {
        let term = s
            .name
            .strip_prefix("beta_")
            .and_then(|j| j.parse::<usize>().ok())
            .map(|j| {
                if j == 0 {
                    "(intercept)".to_string()
                } else {
                    names[j - 1].clone()
                }
            })
            .unwrap_or_default();
        println!(
            "{:<10}{:>14.5}{:>12.5}{:>12.5}{:>12.5}{:>10.1}  {term}",
            s.name, s.mean, s.sd, s.q025, s.q975, s.ess
        );
    }
    if let Some(acc) = samples.diagnostics.gamma_acceptance {
        println!("gamma acceptance rate: {acc:.3}");
    }
    for warn in &samples.diagnostics.warnings {
        eprintln!("warning: {warn}");
    }

    let outputs = vec![samples_path, meta_path, summary_path, density_path, resolved_path];
    manifest(
        "fit",
        a.config.as_deref(),
        vec![a.data.clone()],
        outputs,
        cfg.model.chain.seed,
        start,
        args,
    )?
    .write(&a.out)?;
    Ok(())
}

pub fn resolve_scenario(a: &SimulateArgs) -> Result<SimScenario> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut sc: SimScenario = toml::from_str(&text).with_context(|| format!("parsing {}", a.config.display()))?;
    if a.paper_scale {
        sc = sc.paper_scale();
    }
    if let Some(r) = a.replicates {
        sc.replicates = r;
    }
    if let Some(seed) = a.seed {
        sc.seed = seed;
    }
    sc.validate()?;
    Ok(sc)
}

fn cmd_simulate(a: &SimulateArgs, args: &[String]) -> Result<()> {
    let start = Instant::now();
    let sc = resolve_scenario(a)?;
    let result = run_scenario(&sc)?;
    create_out_dir(&a.out)?;
    let rep_path = a.out.join("replicates.csv");
    result.write_records_csv(std::fs::File::create(&rep_path)?)?;
    let sum_path = a.out.join("summary.csv");
    result.write_summary_csv(std::fs::File::create(&sum_path)?)?;
    let table = result.format_table();
    let table_path = a.out.join("table.txt");
    std::fs::write(&table_path, &table)?;
    let resolved_path = a.out.join("scenario.resolved.toml");
    std::fs::write(&resolved_path, toml::to_string(&sc)?)?;
    print!("{table}");
    for r in result.records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: replicate {} {} failed: {}",
            r.replicate,
            r.model,
            r.error.as_deref().unwrap_or_default()
        );
    }
    let outputs = vec![rep_path, sum_path, table_path, resolved_path];
    manifest("simulate", Some(&a.config), Vec::new(), outputs, sc.seed, start, args)?.write(&a.out)?;
    Ok(())
}

fn load_samples(samples: &Path) -> Result<(PosteriorSamples, SampleMetadata)> {
    let meta_path = samples.with_file_name(META_FILE);
    let meta: SampleMetadata = serde_json::from_str(
        &std::fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?,
    )
    .with_context(|| format!("parsing {}", meta_path.display()))?;
    let file = std::fs::File::open(samples).with_context(|| format!("opening {}", samples.display()))?;
    let s = PosteriorSamples::read_csv(file, meta.clone()).with_context(|| format!("reading {}", samples.display()))?;
    Ok((s, meta))
}

fn assess_data_spec(a: &AssessArgs) -> Result<(DataSpec, Option<PathBuf>)> {
    let path = match &a.config {
        Some(p) => Some(p.clone()),
        None => {
            let p = a.samples.with_file_name(RESOLVED_CONFIG_FILE);
            p.exists().then_some(p)
        }
    };
    match path {
        Some(p) => Ok((FitFile::load(&p)?.data, Some(p))),
        None => Ok((DataSpec::default(), None)),
    }
}

/// Criterion rows for a fitted model on `data`.
pub fn assess_rows(
    samples: &PosteriorSamples,
    data: &Dataset,
    seed: u64,
    m_weight: f64,
    true_beta: Option<&[f64]>,
    test_x: Option<&nalgebra::DMatrix<f64>>,
) -> Result<Vec<ReportRow>> {
    let model = samples.config.model.label();
    let p0 = samples.p0();
    let b = bic_at_posterior_mean(samples, data)?;
    let bic_name = if data.n_censored() > 0 { "bic_censored" } else { "bic" };
    let mut rows = vec![
        ReportRow::new(model, p0, "loglik", b.loglik),
        ReportRow::new(model, p0, "k_params", b.k_params as f64),
        ReportRow::new(model, p0, "n_obs", b.n_obs as f64),
        ReportRow::new(model, p0, bic_name, b.bic),
    ];
    let mut rng = stream_rng(seed, 2);
    let mut reps = posterior_predictive_replicates(samples, &data.x, &mut rng)?;
    if data.n_censored() > 0 {
        censor_replicates(&mut reps, data.threshold);
    }
    rows.extend(ppl_rows(model, p0, &ppl_quadratic(&reps, &data.y, m_weight)?));
    rows.extend(ppl_rows(model, p0, &ppl_check(&reps, &data.y, p0)?));
    if let Some(tb) = true_beta {
        rows.push(ReportRow::new(
            model,
            p0,
            "cie",
            cie_score(&samples.beta, data, tb)?.mean,
        ));
        if let Some(tx) = test_x {
            rows.push(ReportRow::new(
                model,
                p0,
                "mcl",
                mean_check_loss(&samples.beta_mean(), tb, tx, p0)?,
            ));
        }
    }
    Ok(rows)
}

fn cmd_assess(a: &AssessArgs, args: &[String]) -> Result<()> {
    let start = Instant::now();
    let (samples, meta) = load_samples(&a.samples)?;
    let (spec, config_path) = assess_data_spec(a)?;
    let data = build_dataset(&Table::read(&a.data)?, &spec)?;
    if data.p() != samples.n_coef() {
        bail!(
            "data give {} coefficients but the samples have {}",
            data.p(),
            samples.n_coef()
        );
    }
    let test_x = match &a.test_data {
        Some(p) => {
            if a.true_beta.is_none() {
                bail!("--test-data needs --true-beta");
            }
            let test_spec = DataSpec {
                censored: None,
                ..spec.clone()
            };
            Some(build_dataset(&Table::read(p)?, &test_spec)?.x)
        }
        None => None,
    };
    let seed = a.seed.unwrap_or(meta.seed);
    let rows = assess_rows(
        &samples,
        &data,
        seed,
        a.m_weight.unwrap_or(f64::INFINITY),
        a.true_beta.as_deref(),
        test_x.as_ref(),
    )?;
    create_out_dir(&a.out)?;
    let report_path = a.out.join("report.csv");
    write_report_csv(&rows, std::fs::File::create(&report_path)?)?;
    write_report_csv(&rows, std::io::stdout().lock())?;
    let mut inputs = vec![a.samples.clone(), a.data.clone()];
    inputs.extend(a.test_data.clone());
    manifest(
        "assess",
        config_path.as_deref(),
        inputs,
        vec![report_path],
        seed,
        start,
        args,
    )?
    .write(&a.out)?;
    Ok(())
}

fn cmd_replay(a: &ReplayArgs) -> Result<()> {
    let m = RunManifest::load(&a.manifest)?;
    let mut args = m.args.clone();
    if let Some(out) = &a.out {
        let abs = std::path::absolute(out)?;
        match args.iter().position(|s| s == "--out") {
            Some(i) if i + 1 < args.len() => args[i + 1] = abs.display().to_string(),
            _ => bail!("recorded command has no --out argument"),
        }
    }
    if args.first().map(String::as_str) == Some("replay") {
        bail!("manifest records a replay; refusing to recurse");
    }
    std::env::set_current_dir(&m.cwd).with_context(|| format!("entering {}", m.cwd.display()))?;
    let argv = std::iter::once("galqr".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv).context("parsing recorded arguments")?;
    run(cli, &args)
}
