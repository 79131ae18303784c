//! Small-deviation asymptotics for S = Σ qⁿXₙ and M = supₙ qⁿXₙ with i.i.d.
//! non-negative Xₙ: closed-form predictors, exact and bounded evaluation of
//! the log-Laplace exponent of S, and independent numerical estimators of
//! −log P(S ≤ ε) and −log P(M ≤ ε).
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the scalar type.
//!
//! ```
//! use smalldev::{DistributionSpec64, SeriesSpec64};
//! use smalldev::asymptotics::{predict, Target};
//! use smalldev::estimators::sup_exact_product;
//!
//! let levy = DistributionSpec64::stable(0.5, 1.0).unwrap();
//! let series = SeriesSpec64::new(0.5, levy).unwrap();
//! let rate = predict(series.dist(), series.q(), Target::Sup).unwrap();
//! let exact = sup_exact_product(&series, 1e-5, 1e-10).unwrap();
//! assert!((exact.neg_log_p / rate.evaluate(1e-5) - 1.0).abs() < 0.02);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod asymptotics;
pub mod distributions;
mod error;
pub mod estimators;
pub mod optimize;
pub mod quadrature;
mod scalar;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DistributionSpec64 = distributions::DistributionSpec<f64>;
pub type DistributionSpec32 = distributions::DistributionSpec<f32>;
pub type TailClass64 = distributions::TailClass<f64>;
pub type TailClass32 = distributions::TailClass<f32>;
pub type SeriesSpec64 = series::SeriesSpec<f64>;
pub type SeriesSpec32 = series::SeriesSpec<f32>;
pub type LogLaplaceBracket64 = series::LogLaplaceBracket<f64>;
pub type LogLaplaceBracket32 = series::LogLaplaceBracket<f32>;
pub type AsymptoticPrediction64 = asymptotics::AsymptoticPrediction<f64>;
pub type AsymptoticPrediction32 = asymptotics::AsymptoticPrediction<f32>;
pub type TailEstimate64 = estimators::TailEstimate<f64>;
pub type TailEstimate32 = estimators::TailEstimate<f32>;
pub type MonteCarloConfig64 = estimators::MonteCarloConfig<f64>;
pub type MonteCarloConfig32 = estimators::MonteCarloConfig<f32>;
pub type ConvergenceTable64 = analysis::ConvergenceTable<f64>;
pub type ConvergenceTable32 = analysis::ConvergenceTable<f32>;
pub type OrderFit64 = analysis::OrderFit<f64>;
pub type OrderFit32 = analysis::OrderFit<f32>;
