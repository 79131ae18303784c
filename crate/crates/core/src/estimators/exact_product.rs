use super::{check_epsilon, EstimateError, Method, TailEstimate};
use crate::asymptotics::Target;
use crate::series::{SeriesSpec, MAX_TERMS};
use crate::{Error, Real, Result};

/// Default certified absolute error of [`sup_exact_product`].
pub const DEFAULT_PRODUCT_TOL: f64 = 1e-10;

/// −log P(M ≤ ε) = Σ_{n≥0} −log P(X ≤ ε q^{−n}).
///
/// Terms are summed exactly until the remaining ones are certified to add
/// at most `tol`: with x_k = P(X > ε q^{−k}) ≤ m (ε q^{−k})^{−a} from a
/// fractional moment E X^a = m, and −log(1 − x) ≤ x/(1 − x),
/// Σ_{k≥n} −log(1 − x_k) ≤ m ε^{−a} q^{na} / ((1 − q^a)(1 − x_n)).
/// Laws with bounded support stop exactly once every factor is 1.
pub fn sup_exact_product<T: Real>(
    series: &SeriesSpec<T>,
    eps: T,
    tol: T,
) -> Result<TailEstimate<T>> {
    check_epsilon(eps)?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let dist = series.dist();
    if !dist.has_cdf() {
        return Err(Error::Capability(format!(
            "{dist} has no distribution function"
        )));
    }
    let q = series.q();
    let upper = dist.support_upper();
    let (a, m) = dist.fractional_moment();
    let qa = q.powf(a);
    let estimate = |neg_log_p: T, bound: T, terms: usize| TailEstimate {
        target: Target::Sup,
        epsilon: eps,
        neg_log_p,
        method: Method::ExactProduct,
        error: EstimateError::Certified { bound },
        truncation: Some(terms),
        lambda_star: None,
        unbracketed: false,
    };

    let mut sum = T::zero();
    let mut level = eps;
    for n in 0..MAX_TERMS {
        if upper.is_some_and(|b| level >= b) {
            return Ok(estimate(sum, T::epsilon() * T::of_usize(n) * sum, n));
        }
        let x = m * level.powf(-a);
        if x < T::one() {
            let remainder = x / ((T::one() - qa) * (T::one() - x));
            if remainder <= tol {
                return Ok(estimate(
                    sum,
                    remainder + T::epsilon() * T::of_usize(n) * sum,
                    n,
                ));
            }
        }
        let ln_cdf = dist.ln_cdf(level)?;
        if ln_cdf == T::neg_infinity() {
            return Ok(estimate(T::infinity(), T::zero(), n + 1));
        }
        sum = sum - ln_cdf;
        level = level / q;
    }
    Err(Error::NonConvergence {
        partial: sum.as_f64(),
        remainder: f64::INFINITY,
        terms: MAX_TERMS,
    })
}
