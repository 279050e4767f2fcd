//! `tsml` command-line front end.
//!
//! Every run prints one JSON result document on stdout. Exit codes: 0 on
//! success, 2 for argument and input errors, 3 for capability violations,
//! 4 for unparseable data files.

mod commands;
mod input;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Lib(#[from] tsml::Error),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_capability() => 3,
            CliError::Lib(e) if matches!(e.root(), tsml::Error::Parse { .. }) => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tsml",
    version,
    about = "Time series classification, clustering and forecasting"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Also write the result document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit on a labelled train file and score a test file.
    Classify(ClassifyArgs),
    /// Cluster the cases of a file.
    Cluster(ClusterArgs),
    /// Forecast a plain series file.
    Forecast(ForecastArgs),
    /// Distance between two single series.
    Dist(DistArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    #[arg(long, default_value = "dtw")]
    metric: String,
    /// Band width as a fraction of the longer series.
    #[arg(long)]
    window: Option<f64>,
    /// Weight steepness for wdtw and wddtw.
    #[arg(long)]
    g: Option<f64>,
    /// Match threshold for edr and lcss.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Split and merge cost for msm.
    #[arg(long)]
    c: Option<f64>,
    /// Stiffness for twe.
    #[arg(long)]
    nu: Option<f64>,
    /// Edit penalty for twe.
    #[arg(long)]
    lambda: Option<f64>,
    /// Gap value for erp.
    #[arg(long = "erp-g")]
    erp_g: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierName {
    Rocket,
    Knn,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_enum)]
    estimator: ClassifierName,
    #[arg(long, default_value_t = 10_000)]
    kernels: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    distance: DistanceArgs,
    /// Zero-pad ragged inputs to the longest training case.
    #[arg(long)]
    pad: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AveragingName {
    Mean,
    Dba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClustererName {
    Kmeans,
    Kmedoids,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    distance: DistanceArgs,
    #[arg(long, value_enum, default_value_t = AveragingName::Mean)]
    averaging: AveragingName,
    #[arg(long, value_enum, default_value_t = ClustererName::Kmeans)]
    algorithm: ClustererName,
    #[arg(long = "max-iter", default_value_t = 50)]
    max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Naive,
    Trend,
    Reduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    Last,
    Mean,
    Seasonal,
}

#[derive(Debug, Args)]
struct ForecastArgs {
    #[arg(long)]
    series: PathBuf,
    #[arg(long, value_enum)]
    method: MethodName,
    #[arg(long, value_enum, default_value_t = StrategyName::Last)]
    strategy: StrategyName,
    /// Seasonal period for the seasonal strategy.
    #[arg(long)]
    sp: Option<usize>,
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// Number of lagged values fed to the reduction regressor.
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Comma-separated, strictly increasing steps ahead.
    #[arg(long)]
    fh: String,
    /// Hold back this many final points and score forecasts against them.
    #[arg(long)]
    holdout: Option<usize>,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    distance: DistanceArgs,
}

pub use commands::RunResult;

/// Runs a parsed command and returns the result document, newline included.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let result = match &cli.command {
        Command::Classify(a) => commands::classify(a, cli.seed)?,
        Command::Cluster(a) => commands::cluster(a, cli.seed)?,
        Command::Forecast(a) => commands::forecast(a, cli.seed)?,
        Command::Dist(a) => commands::dist(a, cli.seed)?,
    };
    let mut doc = serde_json::to_string(&result).map_err(|e| CliError::Usage(e.to_string()))?;
    doc.push('\n');
    if let Some(path) = &cli.out {
        std::fs::write(path, &doc)?;
    }
    Ok(doc)
}

/// Outcome of a full invocation: exit code plus what goes to each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Outcome { code, stdout, stderr };
        }
    };
    match run(&cli) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
