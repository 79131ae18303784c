//! Independent numerical estimates of −log P(S ≤ ε) and −log P(M ≤ ε).
//!
//! * [`sup_exact_product`]: −log P(M ≤ ε) = Σₙ −log P(X ≤ ε q^{−n}), summed with a
//!   certified remainder.
//! * [`sum_chernoff`]: the exponential Chebyshev bound sup_λ (F(λ) − λε), a
//!   certified lower bound on −log P(S ≤ ε).
//! * [`sum_monte_carlo`] / [`sup_monte_carlo`]: direct simulation of the
//!   truncated series at moderate ε.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::Target;
use crate::series::SeriesSpec;
use crate::{Error, Real};

mod chernoff;
mod exact_product;
mod monte_carlo;

pub use chernoff::{sum_chernoff, CHERNOFF_TOL};
pub use exact_product::{sup_exact_product, DEFAULT_PRODUCT_TOL};
pub use monte_carlo::{
    sum_monte_carlo, sup_monte_carlo, MonteCarloConfig, CHUNK_SIZE, MIN_EXPECTED_HITS, Z_99,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactProduct,
    Chernoff,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactProduct => "exact-product",
            Method::Chernoff => "chernoff",
            Method::MonteCarlo => "monte-carlo",
        }
    }

    /// Whether the method estimates the given target.
    pub fn supports(self, target: Target) -> bool {
        match self {
            Method::ExactProduct => target == Target::Sup,
            Method::Chernoff => target == Target::Sum,
            Method::MonteCarlo => true,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "exact-product" | "exactproduct" | "exact" => Ok(Method::ExactProduct),
            "chernoff" => Ok(Method::Chernoff),
            "monte-carlo" | "montecarlo" | "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// How far an estimate can be from the true −log P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimateError<T = f64> {
    /// |estimate − truth| ≤ bound.
    Certified { bound: T },
    /// estimate ≤ truth; `numerical` bounds the evaluation error of the bound itself.
    LowerBound { numerical: T },
    /// Wilson 99% interval for P and its image on the −log P scale.
    Confidence {
        p_hat: T,
        p_lo: T,
        p_hi: T,
        half_width: T,
        hits: u64,
        n_samples: u64,
        seed: u64,
    },
}

impl<T: Real> EstimateError<T> {
    /// Single-number summary: the certified bound, the numerical error of a
    /// lower bound, or the half-width of the interval on the −log P scale.
    pub fn magnitude(&self) -> T {
        match *self {
            EstimateError::Certified { bound } => bound,
            EstimateError::LowerBound { numerical } => numerical,
            EstimateError::Confidence { half_width, .. } => half_width,
        }
    }
}

/// One estimate of −log P(S ≤ ε) or −log P(M ≤ ε).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate<T = f64> {
    pub target: Target,
    pub epsilon: T,
    /// +∞ when the event has probability zero.
    pub neg_log_p: T,
    pub method: Method,
    pub error: EstimateError<T>,
    /// Number of series terms used.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncation: Option<usize>,
    /// Optimizing λ of the Chernoff bound.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_star: Option<T>,
    /// Set when the Chernoff optimizer found no interior maximum and returned 0.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub unbracketed: bool,
}

/// Tolerances and sampling parameters shared by [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSettings<T = f64> {
    /// Certified absolute error of the sup product.
    pub product_tol: T,
    pub monte_carlo: MonteCarloConfig<T>,
}

impl<T: Real> Default for EstimatorSettings<T> {
    fn default() -> Self {
        EstimatorSettings {
            product_tol: T::lit(DEFAULT_PRODUCT_TOL),
            monte_carlo: MonteCarloConfig::new(1_000_000, 0),
        }
    }
}

/// Runs `method` for `target` at a single ε.
pub fn estimate<T: Real>(
    series: &SeriesSpec<T>,
    target: Target,
    method: Method,
    eps: T,
    settings: &EstimatorSettings<T>,
) -> crate::Result<TailEstimate<T>> {
    match (method, target) {
        (Method::ExactProduct, Target::Sup) => sup_exact_product(series, eps, settings.product_tol),
        (Method::Chernoff, Target::Sum) => sum_chernoff(series, eps),
        (Method::MonteCarlo, Target::Sum) => sum_monte_carlo(series, eps, &settings.monte_carlo),
        (Method::MonteCarlo, Target::Sup) => sup_monte_carlo(series, eps, &settings.monte_carlo),
        (method, target) => Err(Error::Capability(format!(
            "{method} does not estimate the {target}"
        ))),
    }
}

pub(crate) fn check_epsilon<T: Real>(eps: T) -> crate::Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "ε must be positive and finite, got {eps}"
        )))
    }
}
