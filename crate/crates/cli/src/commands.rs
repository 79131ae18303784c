use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use smalldev::analysis::{build_table, fit_order, MIN_FIT_ROWS};
use smalldev::asymptotics::{predict, AsymptoticPrediction, Target};
use smalldev::estimators::{EstimatorSettings, MonteCarloConfig};
use smalldev::series::SeriesSpec;
use smalldev::Error;

use crate::config::{EstimateArgs, Format, RunConfig, SeriesArgs};
use crate::verify::{self, Plan};

pub const EXIT_CLASSIFICATION: u8 = 2;
pub const EXIT_ALL_ROWS_FAILED: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new(EXIT_CONFIG, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::new(1, format!("cannot write {}: {e}", path.display()))
}

fn prediction_error(e: Error) -> CliError {
    CliError::new(EXIT_CLASSIFICATION, e.to_string())
}

fn build_series(config: &RunConfig) -> CliResult<(SeriesSpec, Target)> {
    let (dist, q, target) = config.require_series().map_err(CliError::config)?;
    let series = SeriesSpec::new(q, dist).map_err(|e| CliError::config(e.to_string()))?;
    Ok((series, target.into()))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes the report to `--out` or standard output. CSV reports carry the
/// resolved config in a `<out>.config.json` sidecar, or on standard error
/// when printed.
fn emit(config: &RunConfig, body: &str) -> CliResult {
    match &config.output.path {
        Some(path) => {
            fs::write(path, body).map_err(|e| io_error(path, e))?;
            if config.output.format == Format::Csv {
                let sidecar = sibling(path, ".config.json");
                fs::write(&sidecar, to_json(config)).map_err(|e| io_error(&sidecar, e))?;
            }
        }
        None => {
            if config.output.format == Format::Csv {
                eprintln!(
                    "# config: {}",
                    serde_json::to_string(config).expect("config serializes")
                );
            }
            io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::new(1, format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn prediction_csv(p: &AsymptoticPrediction) -> String {
    let exponent = p.exponent.map(|e| e.to_string()).unwrap_or_default();
    format!(
        "target,shape,constant,exponent\n{},{:?},{},{}\n",
        p.target, p.shape, p.constant, exponent
    )
}

pub fn predict_cmd(args: &SeriesArgs) -> CliResult {
    let config = RunConfig::for_predict(args).map_err(CliError::config)?;
    let (series, target) = build_series(&config)?;
    let prediction = predict(series.dist(), series.q(), target).map_err(prediction_error)?;
    let body = match config.output.format {
        Format::Csv => prediction_csv(&prediction),
        Format::Json => to_json(&json!({
            "config": config,
            "tail_class": series.dist().classify_tail(),
            "prediction": prediction,
        })),
    };
    emit(&config, &body)
}

pub fn estimate_cmd(args: &EstimateArgs) -> CliResult {
    let config = RunConfig::for_estimate(args).map_err(CliError::config)?;
    let (series, target) = build_series(&config)?;
    let method = config.method.estimator().expect("resolved to an estimator");
    let mut settings = EstimatorSettings::default();
    if let Some(mc) = config.mc {
        settings.monte_carlo =
            MonteCarloConfig::new(mc.n_samples, mc.seed).with_workers(mc.workers);
    }
    let grid = config.eps.as_deref().unwrap_or_default();
    let table = build_table(&series, target, method, grid, &settings).map_err(|e| match e {
        Error::InvalidParameter(m) => CliError::config(m),
        e => prediction_error(e),
    })?;
    let body = match config.output.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let fit = if table.successes().count() >= MIN_FIT_ROWS {
                fit_order(&table).ok()
            } else {
                None
            };
            to_json(&json!({ "config": config, "table": table, "fit": fit }))
        }
    };
    emit(&config, &body)?;
    if let Some(path) = &config.output.path {
        for (name, data) in table.plot_data() {
            let file = sibling(path, &format!(".{name}.dat"));
            fs::write(&file, data).map_err(|e| io_error(&file, e))?;
        }
    }
    for row in &table.rows {
        if let smalldev::analysis::RowOutcome::Failed { message } = &row.outcome {
            eprintln!("warning: eps={} failed: {message}", row.epsilon);
        }
    }
    if table.successes().next().is_none() {
        return Err(CliError::new(
            EXIT_ALL_ROWS_FAILED,
            "every grid point failed",
        ));
    }
    Ok(())
}

pub fn verify_cmd(args: &SeriesArgs, perturb_q: Option<f64>) -> CliResult {
    let config = RunConfig::for_verify(args).map_err(CliError::config)?;
    if let Some(q) = config.q {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::config(format!("q must lie in (0, 1), got {q}")));
        }
    }
    let checks = verify::run(&Plan::new(config.series, config.q, perturb_q));
    let failures = checks.iter().filter(|c| !c.passed).count();
    let body = match config.output.format {
        Format::Csv => {
            let mut out = String::new();
            for c in &checks {
                out.push_str(&format!(
                    "{} {} {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            out.push_str(&format!("{} checks, {} failed\n", checks.len(), failures));
            out
        }
        Format::Json => to_json(&json!({
            "config": config,
            "checks": checks,
            "passed": failures == 0,
        })),
    };
    emit(&config, &body)?;
    if failures > 0 {
        return Err(CliError::new(
            EXIT_VERIFY,
            format!("{failures} verification checks failed"),
        ));
    }
    Ok(())
}
