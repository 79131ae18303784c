use super::{check_epsilon, EstimateError, Method, TailEstimate};
use crate::asymptotics::Target;
use crate::optimize::{bracket_max, golden_section_max, Bracket};
use crate::series::SeriesSpec;
use crate::{Real, Result};

/// Absolute tolerance for each evaluation of F inside the optimizer.
pub const CHERNOFF_TOL: f64 = 1e-10;

const LOG_LAMBDA_MIN: f64 = -50.0;
const LOG_LAMBDA_TOL: f64 = 1e-9;

/// sup_{λ>0} (F(λ) − λε) ≤ −log P(S ≤ ε).
///
/// F is concave, so the objective is unimodal in u = log λ. The search
/// starts at λ = 1/ε, brackets the maximum with doubling steps and refines
/// it by golden section. When no interior maximum exists the bound is 0 and
/// the estimate is flagged.
pub fn sum_chernoff<T: Real>(series: &SeriesSpec<T>, eps: T) -> Result<TailEstimate<T>> {
    check_epsilon(eps)?;
    let tol = T::lit(CHERNOFF_TOL);
    let objective = |u: T| -> Result<T> {
        let lambda = u.exp();
        Ok(series.f_exact(lambda, tol)?.value - lambda * eps)
    };
    let lo = T::lit(LOG_LAMBDA_MIN);
    let hi = T::max_value().ln() - T::one();
    let start = eps.recip().ln();
    let unbracketed = TailEstimate {
        target: Target::Sum,
        epsilon: eps,
        neg_log_p: T::zero(),
        method: Method::Chernoff,
        error: EstimateError::LowerBound {
            numerical: T::zero(),
        },
        truncation: None,
        lambda_star: None,
        unbracketed: true,
    };
    let (a, b) = match bracket_max(objective, start, T::one(), lo, hi)? {
        Bracket::Interior { a, b, .. } => (a, b),
        Bracket::BelowRange | Bracket::AboveRange => return Ok(unbracketed),
    };
    let best = golden_section_max(objective, a, b, T::lit(LOG_LAMBDA_TOL))?;
    let lambda = best.x.exp();
    let f = series.f_exact(lambda, tol)?;
    let value = f.value - f.error - lambda * eps;
    if !(value > T::zero()) {
        return Ok(unbracketed);
    }
    Ok(TailEstimate {
        neg_log_p: value,
        error: EstimateError::LowerBound { numerical: f.error },
        lambda_star: Some(lambda),
        unbracketed: false,
        ..unbracketed
    })
}
