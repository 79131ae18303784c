use super::{DistributionSpec, LawKind};
use crate::quadrature::{integrate_best, Integral, DEFAULT_MAX_EVALS};
use crate::{Error, Real, Result};

/// G(λ) together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLaplace<T> {
    pub value: T,
    pub error: T,
}

// Quadrature runs in u = log t after writing
//   E e^{−λX} = ∫₀^∞ e^{−t} P(X ≤ t/λ) dt,
// which holds for any X ≥ 0 including atoms.
const U_MIN: f64 = -40.0;
const GRID_STEP: f64 = 0.5;
const LOG_WINDOW: f64 = 100.0;
const REL_TOL: f64 = 1e-13;
// Relative error above which a quadrature result is rejected outright.
const ACCEPT_REL: f64 = 1e-9;

impl<T: Real> DistributionSpec<T> {
    /// G(λ) = −log E e^{−λX}.
    pub fn log_laplace(&self, lambda: T) -> Result<T> {
        self.log_laplace_with_error(lambda).map(|g| g.value)
    }

    pub fn log_laplace_with_error(&self, lambda: T) -> Result<LogLaplace<T>> {
        if lambda.is_nan() || lambda < T::zero() {
            return Err(Error::Domain(format!(
                "log-Laplace argument must be non-negative, got {lambda}"
            )));
        }
        if lambda == T::zero() {
            return Ok(LogLaplace {
                value: T::zero(),
                error: T::zero(),
            });
        }
        let exact = |value: T| {
            Ok(LogLaplace {
                value,
                error: T::zero(),
            })
        };
        match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                exact(-(p0 + (T::one() - p0) * (-lambda * atom).exp()).ln())
            }
            LawKind::Exponential { rate } => exact((lambda / rate).ln_1p()),
            LawKind::Gamma { shape, rate } => exact(shape * (lambda / rate).ln_1p()),
            LawKind::StableTotallySkewed { alpha, k } => exact(k * lambda.powf(alpha)),
            LawKind::PowerOfHalfNormal { .. }
            | LawKind::InverseWeibull { .. }
            | LawKind::LogNormal { .. } => self.log_laplace_quadrature(lambda),
        }
    }

    fn log_laplace_quadrature(&self, lambda: T) -> Result<LogLaplace<T>> {
        let rel_tol = T::lit(REL_TOL).max(T::lit(50.0) * T::epsilon());
        let u_hi = T::lit(7.0) + lambda.ln().max(T::zero());
        let step = T::lit(GRID_STEP);
        let n_cells = ((u_hi - T::lit(U_MIN)) / step)
            .ceil()
            .to_usize()
            .unwrap_or(0)
            .max(1);
        let grid: Vec<T> = (0..=n_cells)
            .map(|i| T::lit(U_MIN) + step * T::of_usize(i))
            .collect();

        // First try 1 − E e^{−λX} = ∫ e^{−t} P(X > t/λ) dt, which is accurate when λ is small.
        let sf = |u: T| {
            let t = u.exp();
            (u - t).exp() * self.sf(t / lambda).unwrap_or(T::nan())
        };
        let left = grid
            .iter()
            .position(|&u| u >= T::lit(5.0))
            .unwrap_or(grid.len() - 1);
        let complement = integrate_best(
            sf,
            &grid[..=left.max(1)],
            T::lit(1e-17),
            rel_tol,
            DEFAULT_MAX_EVALS,
        )
        .and_then(|r| accept(r, T::lit(1e-16)))?;
        if complement.value < T::lit(0.5) {
            let one_minus = T::one() - complement.value;
            return Ok(LogLaplace {
                value: -(-complement.value).ln_1p(),
                error: complement.error / one_minus,
            });
        }

        // Otherwise integrate e^{φ(u) − φ_max}, φ(u) = u − e^u + ln P(X ≤ e^u/λ).
        let phi = |u: T| {
            let t = u.exp();
            u - t + self.ln_cdf(t / lambda).unwrap_or(T::nan())
        };
        let values: Vec<T> = grid.iter().map(|&u| phi(u)).collect();
        let shift = values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(T::neg_infinity(), T::max);
        if !shift.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: REL_TOL,
            });
        }
        let floor = shift - T::lit(LOG_WINDOW);
        let first = values
            .iter()
            .position(|&v| v > floor)
            .unwrap_or(0)
            .saturating_sub(1);
        let last = (values
            .iter()
            .rposition(|&v| v > floor)
            .unwrap_or(grid.len() - 1)
            + 1)
        .min(grid.len() - 1);
        let cells = &grid[first..=last.max(first + 1)];
        let integrand = |u: T| {
            let v = phi(u) - shift;
            if v.is_nan() {
                T::zero()
            } else {
                v.exp()
            }
        };
        let body = integrate_best(integrand, cells, T::zero(), rel_tol, DEFAULT_MAX_EVALS)
            .and_then(|r| accept(r, T::zero()))?;
        if body.value <= T::zero() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: REL_TOL,
            });
        }
        Ok(LogLaplace {
            value: -shift - body.value.ln(),
            error: body.error / body.value,
        })
    }
}

fn accept<T: Real>(r: Integral<T>, abs_floor: T) -> Result<Integral<T>> {
    let rel = T::lit(ACCEPT_REL).max(T::lit(1e3) * T::epsilon());
    let limit = (rel * r.value.abs()).max(abs_floor);
    if r.error <= limit {
        Ok(r)
    } else {
        Err(Error::Quadrature {
            achieved: r.error.as_f64(),
            requested: limit.as_f64(),
        })
    }
}
