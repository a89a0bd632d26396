//! Command-line front end.
//!
//! Every command writes its tables into `--out`, together with a
//! `manifest.json` (configuration, seed, version, outputs) and a
//! `timings.json` (thread count and wall-clock seconds per phase).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{correlation_matrix, load_csv, standardize, Dataset, TaskKind};
use crate::engine::{aec_scores, AecReport};
use crate::heatmap;
use crate::report::{output_path, write_with, Manifest, Timings};
use crate::shap::{compare_rankings, shap_linear, ShapReport};
use crate::simgen::{self, SimSpec};
use crate::stability::{nmr, AecExplainer, LinearShapExplainer, NmrComparison};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "aec",
    version,
    about = "Collinearity-aware feature attribution"
)]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Generate a synthetic dataset with informative, redundant and noise features.
    Simulate(SimulateArgs),
    /// Score features with AEC and/or linear Shapley values.
    Explain(ExplainArgs),
    /// Side-by-side AEC and linear Shapley rankings plus their NMR.
    Compare(DataArgs),
    /// Normalized Movement Rate of one or both explainers.
    Nmr(ExplainArgs),
    /// Pearson correlation matrix, optionally rendered as an SVG heatmap.
    Corr(CorrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    Regression,
    Classification,
}

impl From<TaskArg> for TaskKind {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Regression => TaskKind::Regression,
            TaskArg::Classification => TaskKind::BinaryClassification,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Aec,
    LinearShap,
    Both,
}

impl Method {
    fn aec(self) -> bool {
        matches!(self, Method::Aec | Method::Both)
    }

    fn shap(self) -> bool {
        matches!(self, Method::LinearShap | Method::Both)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Defaults to 100000 (classification) or 150000 (regression).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Total feature count; must equal informative + redundant + noise.
    #[arg(long)]
    pub features: Option<usize>,
    #[arg(long)]
    pub informative: Option<usize>,
    #[arg(long)]
    pub redundant: Option<usize>,
    #[arg(long)]
    pub noise: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = SimSpec::DEFAULT_REDUNDANT_NOISE_SD)]
    pub redundant_noise_sd: f64,
    /// Defaults to 10 (regression) or 100 (classification).
    #[arg(long)]
    pub target_noise_sd: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "target")]
    pub target: String,
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Rescale features to mean 0, sd 1 before fitting.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    /// Also render `correlation.svg`.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs `cli` on a thread pool of the requested size.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
    let threads = pool.current_num_threads();
    pool.install(|| run_command(&cli.command, threads))
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn create(dir: &'a Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::Usage(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write<F>(&mut self, name: &str, f: F) -> CliResult<()>
    where
        F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
    {
        let (path, name) = output_path(self.dir, name);
        write_with(&path, f)?;
        self.written.push(name);
        Ok(())
    }

    fn finish<C: Serialize>(
        self,
        command: &str,
        seed: Option<u64>,
        config: C,
        timings: &Timings,
    ) -> CliResult<Vec<PathBuf>> {
        let mut manifest = Manifest::new(command, seed, config);
        manifest.outputs = self.written;
        manifest.write(&self.dir.join("manifest.json"))?;
        timings.write(&self.dir.join("timings.json"))?;
        let mut paths: Vec<PathBuf> = manifest.outputs.iter().map(|n| self.dir.join(n)).collect();
        paths.push(self.dir.join("manifest.json"));
        paths.push(self.dir.join("timings.json"));
        Ok(paths)
    }
}

fn run_command(command: &Command, threads: usize) -> CliResult<Vec<PathBuf>> {
    let mut timings = Timings::new(threads);
    match command {
        Command::Simulate(args) => simulate(args, &mut timings),
        Command::Explain(args) => explain(args, &mut timings),
        Command::Compare(args) => compare(args, &mut timings),
        Command::Nmr(args) => run_nmr(args, &mut timings),
        Command::Corr(args) => corr(args, &mut timings),
    }
}

/// Resolves the simulation spec, filling defaults from the task's reference shape.
pub fn sim_spec(args: &SimulateArgs) -> CliResult<SimSpec> {
    let task = TaskKind::from(args.task);
    let base = match task {
        TaskKind::BinaryClassification => SimSpec::collinear_classification(args.seed),
        TaskKind::Regression => SimSpec::collinear_regression(args.seed),
    };
    let informative = args.informative.unwrap_or(base.n_informative);
    let redundant = args.redundant.unwrap_or(base.n_redundant);
    let noise = match (args.noise, args.features) {
        (Some(noise), _) => noise,
        (None, Some(total)) => total.checked_sub(informative + redundant).ok_or_else(|| {
            CliError::Usage(format!(
                "--features {total} is smaller than informative + redundant ({})",
                informative + redundant
            ))
        })?,
        (None, None) => base.n_noise,
    };
    if let Some(total) = args.features {
        if total != informative + redundant + noise {
            return Err(CliError::Usage(format!(
                "--features {total} does not match informative + redundant + noise = {}",
                informative + redundant + noise
            )));
        }
    }
    let spec = SimSpec {
        n_samples: args.samples.unwrap_or(base.n_samples),
        n_informative: informative,
        n_redundant: redundant,
        n_noise: noise,
        redundant_noise_sd: args.redundant_noise_sd,
        target_noise_sd: args.target_noise_sd.unwrap_or(base.target_noise_sd),
        seed: args.seed,
        task,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn simulate(args: &SimulateArgs, timings: &mut Timings) -> CliResult<Vec<PathBuf>> {
    let spec = sim_spec(args)?;
    let mut out = Outputs::create(&args.out)?;
    let d = timings.time("generate", || simgen::generate(&spec))?;
    let roles = simgen::ground_truth(&spec);
    timings.time("write", || -> CliResult<()> {
        out.write("dataset.csv", |w| d.write_csv(w, "target"))?;
        out.write("roles.csv", |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["feature", "role"])?;
            for (name, role) in d.names().iter().zip(&roles) {
                csv.write_record([name.as_str(), role.prefix()])?;
            }
            csv.flush()
        })
    })?;
    out.finish("simulate", Some(spec.seed), &spec, timings)
}

fn load(args: &DataArgs, timings: &mut Timings) -> CliResult<Dataset> {
    let d = timings.time("load", || {
        load_csv(&args.data, &args.target, args.task.into())
    })?;
    if args.standardize {
        Ok(timings.time("standardize", || standardize(&d))?)
    } else {
        Ok(d)
    }
}

fn write_aec(out: &mut Outputs, r: &AecReport) -> CliResult<()> {
    out.write("aec.csv", |w| r.write_csv(w))
}

fn write_shap(out: &mut Outputs, r: &ShapReport) -> CliResult<()> {
    out.write("linear_shap.csv", |w| r.write_csv(w))
}

fn explain(args: &ExplainArgs, timings: &mut Timings) -> CliResult<Vec<PathBuf>> {
    let mut out = Outputs::create(&args.data.out)?;
    let d = load(&args.data, timings)?;
    if args.method.aec() {
        let r = timings.time("aec", || aec_scores(&d))?;
        if !r.all_targets_converged() {
            eprintln!("warning: some logistic target fits did not converge");
        }
        write_aec(&mut out, &r)?;
    }
    if args.method.shap() {
        let r = timings.time("linear-shap", || shap_linear(&d))?;
        write_shap(&mut out, &r)?;
    }
    out.finish("explain", None, args, timings)
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn compare(args: &DataArgs, timings: &mut Timings) -> CliResult<Vec<PathBuf>> {
    let mut out = Outputs::create(&args.out)?;
    let d = load(args, timings)?;
    let a = timings.time("aec", || aec_scores(&d))?;
    let s = timings.time("linear-shap", || shap_linear(&d))?;
    let table = compare_rankings(&a, &s)?;
    let comparison = NmrComparison {
        aec: timings.time("nmr-aec", || nmr(&d, &AecExplainer))?,
        linear_shap: timings.time("nmr-linear-shap", || nmr(&d, &LinearShapExplainer))?,
    };
    write_aec(&mut out, &a)?;
    write_shap(&mut out, &s)?;
    out.write("ranking_comparison.csv", |w| table.write_table_csv(w))?;
    out.write("rank_displacement.csv", |w| table.write_displacement_csv(w))?;
    let label = dataset_label(&args.data);
    out.write("nmr_comparison.csv", |w| comparison.write_csv(w, &label))?;
    out.finish("compare", None, args, timings)
}

fn run_nmr(args: &ExplainArgs, timings: &mut Timings) -> CliResult<Vec<PathBuf>> {
    let mut out = Outputs::create(&args.data.out)?;
    let d = load(&args.data, timings)?;
    if args.method.aec() {
        let r = timings.time("nmr-aec", || nmr(&d, &AecExplainer))?;
        out.write("nmr_aec.csv", |w| r.write_csv(w))?;
    }
    if args.method.shap() {
        let r = timings.time("nmr-linear-shap", || nmr(&d, &LinearShapExplainer))?;
        out.write("nmr_linear_shap.csv", |w| r.write_csv(w))?;
    }
    out.finish("nmr", None, args, timings)
}

fn corr(args: &CorrArgs, timings: &mut Timings) -> CliResult<Vec<PathBuf>> {
    let mut out = Outputs::create(&args.data.out)?;
    let d = load(&args.data, timings)?;
    let c = timings.time("corr", || correlation_matrix(&d))?;
    out.write("correlation.csv", |w| c.write_csv(w))?;
    if args.svg {
        out.write("correlation.svg", |w| {
            w.write_all(heatmap::render_heatmap(&c).as_bytes())
        })?;
    }
    out.finish("corr", None, args, timings)
}
