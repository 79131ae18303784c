//! The weighted series S = Σ qⁿXₙ and its log-Laplace exponent
//! F(λ) = −log E e^{−λS} = Σ_{n≥0} G(qⁿλ).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::{DistributionSpec, LogLaplace};
use crate::{Error, Real, Result};

/// Cap on the number of series terms summed by [`SeriesSpec::f_exact`].
pub const MAX_TERMS: usize = 100_000;

/// Tolerance used for the cached value of F(1).
pub const F_ONE_TOL: f64 = 1e-10;

/// Weight ratio `q` together with the law of the Xₙ.
///
/// Construction validates the parameters and caches F(1), which every
/// bracket reuses.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec<T = f64> {
    q: T,
    dist: DistributionSpec<T>,
    f_one: LogLaplace<T>,
}

/// Two-sided bound lo ≤ F(λ) ≤ hi for λ > 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLaplaceBracket<T = f64> {
    pub lo: T,
    pub hi: T,
    pub lambda: T,
    pub terms_used: usize,
}

impl<T: Real> SeriesSpec<T> {
    pub fn new(q: T, dist: DistributionSpec<T>) -> Result<Self> {
        if !(q > T::zero() && q < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "q must lie in (0, 1), got {q}"
            )));
        }
        if !dist.check_wellposed() {
            return Err(Error::InvalidParameter(format!(
                "{dist} has E log max(X, 1) = ∞, so the series diverges"
            )));
        }
        let mut series = SeriesSpec {
            q,
            dist,
            f_one: LogLaplace {
                value: T::zero(),
                error: T::zero(),
            },
        };
        series.f_one = series.f_exact(T::one(), T::lit(F_ONE_TOL))?;
        Ok(series)
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn dist(&self) -> &DistributionSpec<T> {
        &self.dist
    }

    /// Cached F(1) with its certified error.
    pub fn f_one(&self) -> LogLaplace<T> {
        self.f_one
    }

    /// F(λ) summed until the certified tail bound drops below `tol`.
    ///
    /// The returned error covers the truncated tail, the quadrature error of
    /// each term and the rounding of the partial sum.
    pub fn f_exact(&self, lambda: T, tol: T) -> Result<LogLaplace<T>> {
        if lambda.is_nan() || lambda < T::zero() {
            return Err(Error::Domain(format!("F needs λ ≥ 0, got {lambda}")));
        }
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if lambda == T::zero() {
            return Ok(LogLaplace {
                value: T::zero(),
                error: T::zero(),
            });
        }
        let bound = self.dist.small_scale_bound();
        let mut sum = T::zero();
        let mut quad_error = T::zero();
        let mut x = lambda;
        for n in 1..=MAX_TERMS {
            let g = self.dist.log_laplace_with_error(x)?;
            sum = sum + g.value;
            quad_error = quad_error + g.error;
            x = x * self.q;
            let tail = if x == T::zero() {
                T::zero()
            } else {
                bound.geometric_tail(x, self.q)
            };
            if tail <= tol {
                let rounding = T::epsilon() * T::of_usize(n) * sum;
                return Ok(LogLaplace {
                    value: sum,
                    error: tail + quad_error + rounding,
                });
            }
        }
        Err(Error::NonConvergence {
            partial: sum.as_f64(),
            remainder: bound.geometric_tail(x, self.q).as_f64(),
            terms: MAX_TERMS,
        })
    }

    /// lo = Σ_{0 ≤ n ≤ N} G(qⁿλ) with q^{N+1}λ < 1 ≤ q^N λ, and hi = lo + F(1).
    pub fn f_bracket(&self, lambda: T) -> Result<LogLaplaceBracket<T>> {
        if lambda.is_nan() || lambda <= T::one() {
            return Err(Error::Domain(format!(
                "the bracket needs λ > 1, got {lambda}"
            )));
        }
        let mut lo = T::zero();
        let mut quad_error = T::zero();
        let mut x = lambda;
        let mut terms_used = 0;
        while x >= T::one() {
            let g = self.dist.log_laplace_with_error(x)?;
            lo = lo + g.value;
            quad_error = quad_error + g.error;
            terms_used += 1;
            x = x * self.q;
        }
        let hi = lo + quad_error + self.f_one.value + self.f_one.error;
        Ok(LogLaplaceBracket {
            lo,
            hi,
            lambda,
            terms_used,
        })
    }

    /// |F(qλ) + G(λ) − F(λ)| with both F values evaluated to `tol`.
    pub fn check_functional_equation(&self, lambda: T, tol: T) -> Result<T> {
        self.functional_equation_residual(lambda, tol, self.q)
    }

    /// Same as [`check_functional_equation`](Self::check_functional_equation)
    /// but evaluates F at `shift·λ` instead of `qλ`.
    #[doc(hidden)]
    pub fn functional_equation_residual(&self, lambda: T, tol: T, shift: T) -> Result<T> {
        if lambda.is_nan() || lambda <= T::zero() {
            return Err(Error::Domain(format!(
                "the functional equation needs λ > 0, got {lambda}"
            )));
        }
        let f_shift = self.f_exact(shift * lambda, tol)?;
        let f = self.f_exact(lambda, tol)?;
        let g = self.dist.log_laplace(lambda)?;
        Ok((f_shift.value + g - f.value).abs())
    }
}

#[derive(Serialize)]
struct SeriesRef<'a, T: Real> {
    q: T,
    dist: &'a DistributionSpec<T>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Real")]
struct SeriesOwned<T: Real> {
    q: T,
    dist: DistributionSpec<T>,
}

impl<T: Real> Serialize for SeriesSpec<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRef {
            q: self.q,
            dist: &self.dist,
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for SeriesSpec<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesOwned::<T>::deserialize(d)?;
        SeriesSpec::new(raw.q, raw.dist).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::distributions::default_catalog;

    type Spec = DistributionSpec<f64>;

    fn series(q: f64, dist: Spec) -> SeriesSpec {
        SeriesSpec::new(q, dist).unwrap()
    }

    /// Σ log(1 + 2^{−n}) summed directly until the terms are negligible.
    fn exponential_f_one() -> f64 {
        let mut s = 0.0;
        let mut n = 0;
        loop {
            let t = (0.5_f64.powi(n)).ln_1p();
            s += t;
            if t < 1e-17 {
                return s;
            }
            n += 1;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let exp = Spec::exponential(1.0).unwrap();
        for q in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(
                SeriesSpec::new(q, exp),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn f_exact_examples() {
        let exp = series(0.5, Spec::exponential(1.0).unwrap());
        assert_eq!(exp.f_exact(0.0, 1e-10).unwrap().value, 0.0);

        let f1 = exp.f_exact(1.0, 1e-12).unwrap();
        let oracle = exponential_f_one();
        assert!((oracle - 1.562_00).abs() < 5e-5);
        assert!((f1.value - oracle).abs() <= f1.error.max(1e-15));
        assert!(f1.error <= 1e-12 + 1e-14);

        let levy = series(0.5, Spec::stable(0.5, 1.0).unwrap());
        let closed = 1.0 / (1.0 - 0.5_f64.sqrt());
        let got = levy.f_exact(1.0, 1e-12).unwrap();
        assert!(
            (got.value - closed).abs() < 1e-11,
            "{} vs {closed}",
            got.value
        );
        assert!((closed - 3.414_214).abs() < 1e-6);
    }

    #[test]
    fn negative_argument_is_rejected() {
        let exp = series(0.5, Spec::exponential(1.0).unwrap());
        assert!(matches!(exp.f_exact(-1.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(exp.f_bracket(1.0), Err(Error::Domain(_))));
        assert!(matches!(exp.f_bracket(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn bracket_examples() {
        let exp = series(0.5, Spec::exponential(1.0).unwrap());
        let b = exp.f_bracket(2.0).unwrap();
        let lo = 3.0_f64.ln() + 2.0_f64.ln();
        assert!((b.lo - lo).abs() < 1e-15);
        assert!((b.hi - (lo + exponential_f_one())).abs() < 2e-10);
        assert!((b.lo - 1.791_76).abs() < 5e-5 && (b.hi - 3.353_76).abs() < 5e-5);
        assert_eq!(b.terms_used, 2);

        for q in [0.3, 0.5, 0.9] {
            let s = series(q, Spec::gamma(2.0, 1.0).unwrap());
            assert_eq!(s.f_bracket(1.0 + 1e-9).unwrap().terms_used, 1);
        }

        let levy = series(0.5, Spec::stable(0.5, 1.0).unwrap());
        let b = levy.f_bracket(8.0).unwrap();
        let f = 8.0_f64.sqrt() / (1.0 - 0.5_f64.sqrt());
        assert!((f - 9.656_85).abs() < 1e-5);
        assert!(b.lo <= f && f <= b.hi, "{f} ∉ [{}, {}]", b.lo, b.hi);
    }

    #[test]
    fn bracket_endpoint_is_included() {
        // λ = q^{−3}: the N = 3 term has argument exactly 1
        let s = series(0.5, Spec::exponential(1.0).unwrap());
        assert_eq!(s.f_bracket(8.0).unwrap().terms_used, 4);
    }

    #[test]
    fn functional_equation_examples() {
        let exp = series(0.5, Spec::exponential(1.0).unwrap());
        assert!(exp.check_functional_equation(1.0, 1e-10).unwrap() <= 3e-10);

        let levy = series(0.5, Spec::stable(0.5, 1.0).unwrap());
        assert!(levy.check_functional_equation(4.0, 1e-14).unwrap() < 1e-13);

        let gamma = series(0.9, Spec::gamma(2.0, 1.0).unwrap());
        assert!(gamma.check_functional_equation(10.0, 1e-10).unwrap() <= 3e-10);

        // evaluating F at a shifted point breaks the identity
        let r = exp.functional_equation_residual(1.0, 1e-10, 0.55).unwrap();
        assert!(r > 1e-3);
    }

    #[test]
    fn stable_closure() {
        for (alpha, k) in [(0.3, 2.0), (0.5, 1.0), (0.7, 0.5)] {
            for q in [0.3, 0.5, 0.9] {
                let s = series(q, Spec::stable(alpha, k).unwrap());
                for lam in [0.01, 1.0, 37.0, 1e5] {
                    let want = k * f64::powf(lam, alpha) / (1.0 - f64::powf(q, alpha));
                    let got = s.f_exact(lam, 1e-12 * want).unwrap().value;
                    assert!(
                        ((got - want) / want).abs() < 1e-10,
                        "α={alpha} q={q} λ={lam}"
                    );
                }
            }
        }
    }

    #[test]
    fn f_exact_is_nondecreasing() {
        for dist in default_catalog::<f64>() {
            let s = series(0.5, dist);
            let mut prev = 0.0;
            for i in 0..=30 {
                let lam = 10f64.powf(-3.0 + 0.3 * i as f64);
                let f = s.f_exact(lam, 1e-10).unwrap();
                assert!(f.value >= prev - 2e-10, "{dist} at λ={lam}");
                prev = f.value;
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let s = series(0.5, Spec::gamma(2.0, 1.0).unwrap());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"q":0.5,"dist":{"kind":"gamma","params":{"rate":1.0,"shape":2.0}}}"#
        );
        let back: SeriesSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(
            serde_json::from_str::<SeriesSpec>(r#"{"q":1.5,"dist":{"kind":"exponential"}}"#)
                .is_err()
        );
    }

    #[test]
    fn single_precision() {
        let s = SeriesSpec::<f32>::new(0.5, DistributionSpec::exponential(1.0).unwrap()).unwrap();
        let f = s.f_exact(1.0, 1e-6).unwrap();
        assert!((f.value - 1.562_024).abs() < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn bracket_contains_f(law in 0usize..15, qi in 0usize..3, log_lam in 0.0043f64..6.0) {
            let dist = default_catalog::<f64>()[law];
            let s = series([0.3, 0.5, 0.9][qi], dist);
            let lam = 10f64.powf(log_lam);
            let b = s.f_bracket(lam).unwrap();
            let f = s.f_exact(lam, 1e-10).unwrap();
            prop_assert!(b.lo <= b.hi);
            prop_assert!(b.lo <= f.value + f.error, "{} > {}", b.lo, f.value);
            prop_assert!(f.value - f.error <= b.hi, "{} > {}", f.value, b.hi);
            prop_assert!(s.check_functional_equation(lam, 1e-10).unwrap() <= 3e-10);
        }
    }
}
