//! Convergence tables comparing estimates with predicted rates, and
//! least-squares recovery of the logarithmic order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict, AsymptoticPrediction, Target};
use crate::estimators::{estimate, EstimatorSettings, Method, TailEstimate};
use crate::series::SeriesSpec;
use crate::{Error, Real, Result};

/// CSV header of [`ConvergenceTable::to_csv`].
pub const CSV_HEADER: &str = "epsilon,neg_log_p,method,error,predicted,ratio";

/// Minimum number of successful rows for [`fit_order`].
pub const MIN_FIT_ROWS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase", bound = "T: Real")]
pub enum RowOutcome<T = f64> {
    Ok { estimate: TailEstimate<T>, ratio: T },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TableRow<T = f64> {
    pub epsilon: T,
    pub predicted: T,
    #[serde(flatten)]
    pub outcome: RowOutcome<T>,
}

impl<T: Real> TableRow<T> {
    pub fn estimate(&self) -> Option<&TailEstimate<T>> {
        match &self.outcome {
            RowOutcome::Ok { estimate, .. } => Some(estimate),
            RowOutcome::Failed { .. } => None,
        }
    }

    pub fn ratio(&self) -> Option<T> {
        match self.outcome {
            RowOutcome::Ok { ratio, .. } => Some(ratio),
            RowOutcome::Failed { .. } => None,
        }
    }
}

/// Estimates over a decreasing ε grid next to the predicted rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable<T: Real = f64> {
    pub series: SeriesSpec<T>,
    pub target: Target,
    pub method: Method,
    pub prediction: AsymptoticPrediction<T>,
    pub rows: Vec<TableRow<T>>,
}

/// Checks that `grid` is strictly decreasing inside (0, 1).
pub fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if let Some(e) = grid.iter().find(|e| !(**e > T::zero() && **e < T::one())) {
        return Err(Error::InvalidParameter(format!(
            "ε values must lie in (0, 1), got {e}"
        )));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "the ε grid must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Logarithmic grid with `points` values from 10^{−1} down to `floor`.
pub fn log_grid<T: Real>(floor: T, points: usize) -> Vec<T> {
    let top = T::lit(0.1).ln();
    let bottom = floor.ln();
    match points {
        0 => Vec::new(),
        1 => vec![T::lit(0.1)],
        _ => (0..points)
            .map(|i| (top + (bottom - top) * T::of_usize(i) / T::of_usize(points - 1)).exp())
            .collect(),
    }
}

/// Default grid for a method: decades down to 10^{−8} for the deterministic
/// estimators, and a short moderate range for Monte Carlo.
pub fn default_grid<T: Real>(method: Method) -> Vec<T> {
    match method {
        Method::ExactProduct | Method::Chernoff => log_grid(T::lit(1e-8), 8),
        Method::MonteCarlo => [0.5, 0.3, 0.2, 0.1, 0.05].into_iter().map(T::lit).collect(),
    }
}

/// Runs `method` at every ε of the grid (in parallel) and attaches the
/// predicted rate and the ratio estimate/prediction. Estimator errors are
/// recorded per row.
pub fn build_table<T: Real>(
    series: &SeriesSpec<T>,
    target: Target,
    method: Method,
    grid: &[T],
    settings: &EstimatorSettings<T>,
) -> Result<ConvergenceTable<T>> {
    check_grid(grid)?;
    if !method.supports(target) {
        return Err(Error::Capability(format!(
            "{method} does not estimate the {target}"
        )));
    }
    let prediction = predict(series.dist(), series.q(), target)?;
    let rows = grid
        .par_iter()
        .map(|&eps| {
            let predicted = prediction.evaluate(eps);
            let outcome = match estimate(series, target, method, eps, settings) {
                Ok(estimate) => RowOutcome::Ok {
                    ratio: estimate.neg_log_p / predicted,
                    estimate,
                },
                Err(e) => RowOutcome::Failed {
                    message: e.to_string(),
                },
            };
            TableRow {
                epsilon: eps,
                predicted,
                outcome,
            }
        })
        .collect();
    Ok(ConvergenceTable {
        series: series.clone(),
        target,
        method,
        prediction,
        rows,
    })
}

impl<T: Real> ConvergenceTable<T> {
    pub fn successes(&self) -> impl Iterator<Item = &TailEstimate<T>> {
        self.rows.iter().filter_map(TableRow::estimate)
    }

    /// Whether |ratio − 1| is nonincreasing over the last `k` successful rows.
    pub fn ratio_trend_holds(&self, k: usize) -> bool {
        let gaps: Vec<T> = self
            .rows
            .iter()
            .filter_map(TableRow::ratio)
            .map(|r| (r - T::one()).abs())
            .collect();
        let tail = &gaps[gaps.len().saturating_sub(k)..];
        tail.windows(2).all(|w| w[1] <= w[0])
    }

    /// CSV with header [`CSV_HEADER`]; failed rows leave the estimate columns empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            match &row.outcome {
                RowOutcome::Ok { estimate, ratio } => writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.epsilon,
                    estimate.neg_log_p,
                    self.method,
                    estimate.error.magnitude(),
                    row.predicted,
                    ratio
                ),
                RowOutcome::Failed { .. } => {
                    writeln!(out, "{},,{},,{},", row.epsilon, self.method, row.predicted)
                }
            }
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// Two-column whitespace-separated curves: `("estimate", ...)` with the
    /// successful rows and `("predicted", ...)` with the prediction on the grid.
    pub fn plot_data(&self) -> Vec<(&'static str, String)> {
        let mut estimate = String::from("# epsilon neg_log_p\n");
        let mut predicted = String::from("# epsilon predicted\n");
        for row in &self.rows {
            if let Some(e) = row.estimate() {
                writeln!(estimate, "{} {}", row.epsilon, e.neg_log_p).expect("infallible");
            }
            writeln!(predicted, "{} {}", row.epsilon, row.predicted).expect("infallible");
        }
        vec![("estimate", estimate), ("predicted", predicted)]
    }
}

/// Fitted model of ε ↦ −log P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum FitModel<T = f64> {
    /// c·ε^{−gamma}
    PowerLaw { c: T, gamma: T },
    /// c·(log 1/ε)^g
    LogPower { c: T, g: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit<T = f64> {
    #[serde(flatten)]
    pub model: FitModel<T>,
    /// RMS residual in the transformed coordinates of the chosen model.
    pub residual: T,
}

/// Fits both models to the successful rows of `table` and keeps the one with
/// the smaller residual.
pub fn fit_order<T: Real>(table: &ConvergenceTable<T>) -> Result<OrderFit<T>> {
    let points: Vec<(T, T)> = table
        .rows
        .iter()
        .filter_map(|r| r.estimate().map(|e| (r.epsilon, e.neg_log_p)))
        .filter(|(_, y)| y.is_finite() && *y > T::zero())
        .collect();
    fit_points(&points)
}

/// Same as [`fit_order`] on raw (ε, −log P) pairs.
pub fn fit_points<T: Real>(points: &[(T, T)]) -> Result<OrderFit<T>> {
    if points.len() < MIN_FIT_ROWS {
        return Err(Error::Fit(format!(
            "need at least {MIN_FIT_ROWS} usable rows, got {}",
            points.len()
        )));
    }
    if let Some((e, y)) = points
        .iter()
        .find(|(e, y)| !(*e > T::zero() && *e < T::one() && *y > T::zero() && y.is_finite()))
    {
        return Err(Error::Fit(format!(
            "unusable point (ε = {e}, −log P = {y})"
        )));
    }
    let log_y: Vec<T> = points.iter().map(|(_, y)| y.ln()).collect();
    let log_inv: Vec<T> = points.iter().map(|(e, _)| e.recip().ln()).collect();
    let log_log: Vec<T> = log_inv.iter().map(|x| x.ln()).collect();

    let (a_pow, gamma, r_pow) = least_squares(&log_inv, &log_y)?;
    let (a_log, g, r_log) = least_squares(&log_log, &log_y)?;
    Ok(if r_log <= r_pow {
        OrderFit {
            model: FitModel::LogPower { c: a_log.exp(), g },
            residual: r_log,
        }
    } else {
        OrderFit {
            model: FitModel::PowerLaw {
                c: a_pow.exp(),
                gamma,
            },
            residual: r_pow,
        }
    })
}

/// Ordinary least squares y ≈ a + b·x; returns (a, b, rms residual).
fn least_squares<T: Real>(x: &[T], y: &[T]) -> Result<(T, T, T)> {
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxx: T = x.iter().map(|&xi| (xi - mx) * (xi - mx)).sum();
    let sxy: T = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (xi - mx) * (yi - my))
        .sum();
    if !(sxx > T::epsilon() * mx.abs().max(T::one()) * n) {
        return Err(Error::Fit("all ε values coincide".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: T = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - a - b * xi;
            r * r
        })
        .sum();
    Ok((a, b, (sse / n).sqrt()))
}
