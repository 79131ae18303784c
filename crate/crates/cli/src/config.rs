use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use smalldev::asymptotics::Target;
use smalldev::estimators::Method;
use smalldev::DistributionSpec64;

pub const SEED_ENV: &str = "SMALLDEV_SEED";
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TargetArg {
    Sum,
    Sup,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Sum => Target::Sum,
            TargetArg::Sup => Target::Sup,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    #[value(alias = "exact")]
    ExactProduct,
    Chernoff,
    #[value(alias = "mc")]
    MonteCarlo,
    Predict,
}

impl MethodArg {
    pub fn estimator(self) -> Option<Method> {
        match self {
            MethodArg::ExactProduct => Some(Method::ExactProduct),
            MethodArg::Chernoff => Some(Method::Chernoff),
            MethodArg::MonteCarlo => Some(Method::MonteCarlo),
            MethodArg::Predict => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct SeriesArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Law of the Xₙ, e.g. `exponential:rate=1` or `stable:alpha=0.5,K=1`.
    #[arg(long, value_name = "SPEC")]
    pub dist: Option<DistributionSpec64>,
    /// Weight ratio q in (0, 1).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub target: Option<TargetArg>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Comma-separated, strictly decreasing ε values in (0, 1).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub eps: Option<Vec<f64>>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Monte Carlo seed (falls back to $SMALLDEV_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Configuration file layout; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(alias = "dist")]
    pub series: Option<DistributionSpec64>,
    pub q: Option<f64>,
    pub target: Option<TargetArg>,
    pub method: Option<MethodArg>,
    #[serde(alias = "eps_grid")]
    pub eps: Option<Vec<f64>>,
    #[serde(default)]
    pub mc: McFile,
    #[serde(default)]
    pub output: OutputFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McFile {
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// Fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<DistributionSpec64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetArg>,
    pub method: MethodArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// Reads the configuration file, if any.
pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| format!("invalid configuration {}: {e}", path.display()))
}

fn seed_from_env() -> Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

impl RunConfig {
    fn base(args: &SeriesArgs, file: &FileConfig, method: MethodArg) -> Self {
        RunConfig {
            series: args.dist.or(file.series),
            q: args.q.or(file.q),
            target: args.target.or(file.target),
            method,
            eps: None,
            mc: None,
            output: OutputConfig {
                format: args.format.or(file.output.format).unwrap_or_default(),
                path: args.out.clone().or_else(|| file.output.path.clone()),
            },
        }
    }

    pub fn for_predict(args: &SeriesArgs) -> Result<Self, String> {
        let file = load(args.config.as_deref())?;
        let config = Self::base(args, &file, MethodArg::Predict);
        config.require_series()?;
        Ok(config)
    }

    pub fn for_verify(args: &SeriesArgs) -> Result<Self, String> {
        let file = load(args.config.as_deref())?;
        let mut config = Self::base(args, &file, MethodArg::Predict);
        config.target = None;
        Ok(config)
    }

    pub fn for_estimate(args: &EstimateArgs) -> Result<Self, String> {
        let file = load(args.series.config.as_deref())?;
        let mut config = Self::base(&args.series, &file, MethodArg::Predict);
        let (_, _, target) = config.require_series()?;
        let method = args.method.or(file.method).unwrap_or(match target {
            TargetArg::Sum => MethodArg::Chernoff,
            TargetArg::Sup => MethodArg::ExactProduct,
        });
        let estimator = method
            .estimator()
            .ok_or("method `predict` is only valid for the predict subcommand")?;
        if !estimator.supports(target.into()) {
            return Err(format!(
                "{estimator} does not estimate the {}",
                Target::from(target)
            ));
        }
        config.method = method;
        let eps = args
            .eps
            .clone()
            .or_else(|| file.eps.clone())
            .unwrap_or_else(|| smalldev::analysis::default_grid(estimator));
        if eps.is_empty() {
            return Err("the ε grid is empty".into());
        }
        smalldev::analysis::check_grid(&eps).map_err(|e| e.to_string())?;
        config.eps = Some(eps);
        if estimator == Method::MonteCarlo {
            let seed = match args.seed.or(file.mc.seed) {
                Some(s) => s,
                None => seed_from_env()?.unwrap_or(0),
            };
            let n_samples = args
                .samples
                .or(file.mc.n_samples)
                .unwrap_or(DEFAULT_SAMPLES);
            if n_samples == 0 {
                return Err("the sample count must be positive".into());
            }
            config.mc = Some(McConfig {
                n_samples,
                seed,
                workers: args.workers.or(file.mc.workers).unwrap_or(0),
            });
        }
        Ok(config)
    }

    /// The law, q and target, all of which predict and estimate need.
    pub fn require_series(&self) -> Result<(DistributionSpec64, f64, TargetArg), String> {
        let dist = self
            .series
            .ok_or("no distribution given (use --dist or the `series` config field)")?;
        let q = self
            .q
            .ok_or("no weight ratio given (use --q or the `q` config field)")?;
        let target = self
            .target
            .ok_or("no target given (use --target sum|sup)")?;
        Ok((dist, q, target))
    }
}
