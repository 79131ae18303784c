//! Catalog of non-negative laws X: log-Laplace exponents, distribution
//! functions, samplers and lower-tail classification.

mod laplace;
mod sampling;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::special::{
    erf, erfc, gamma_p, gamma_q, ln_erf_from_ln, ln_erfc, ln_gamma, ln_gamma_p, ln_normal_cdf,
};
use crate::{asymptotics, Error, Real, Result};

pub use laplace::LogLaplace;

/// The laws supported by the catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind<T = f64> {
    /// P(X = 0) = p0, P(X = atom) = 1 − p0.
    BernoulliAtZero {
        p0: T,
        atom: T,
    },
    Exponential {
        rate: T,
    },
    Gamma {
        shape: T,
        rate: T,
    },
    /// X = |Z|^p for standard normal Z.
    PowerOfHalfNormal {
        p: T,
    },
    /// Positive α-stable law with E e^{−λX} = exp(−K λ^α).
    StableTotallySkewed {
        alpha: T,
        k: T,
    },
    /// P(X ≤ x) = exp(−(scale/x)^shape).
    InverseWeibull {
        shape: T,
        scale: T,
    },
    LogNormal {
        mu: T,
        sigma: T,
    },
}

/// A validated non-negative law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec<T = f64> {
    kind: LawKind<T>,
}

/// Behavior of P(X ≤ ε) as ε → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum TailClass<T = f64> {
    /// P(X = 0) = p0 > 0.
    AtomAtZero {
        p0: T,
    },
    /// P(X ≤ ε) ≈ ε^β.
    Polynomial {
        beta: T,
    },
    /// −log P(X ≤ ε) ∼ K ε^{−γ}.
    ExponentialSmall {
        k: T,
        gamma: T,
    },
    Unclassified,
}

/// Upper envelope for G near zero, used to certify series remainders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum SmallScaleBound<T> {
    /// G(x) ≤ slope·x (finite mean; G is concave with G'(0) = E X).
    Linear { slope: T },
    /// G(x) = coef·x^exponent exactly.
    Power { coef: T, exponent: T },
    /// E X^order = moment, giving G(x) ≤ φ/(1 − φ) with φ = moment·x^order.
    Moment { order: T, moment: T },
}

impl<T: Real> SmallScaleBound<T> {
    /// Bound on Σ_{n≥0} G(qⁿ x0).
    pub(crate) fn geometric_tail(&self, x0: T, q: T) -> T {
        match *self {
            SmallScaleBound::Linear { slope } => slope * x0 / (T::one() - q),
            SmallScaleBound::Power { coef, exponent } => {
                coef * x0.powf(exponent) / (T::one() - q.powf(exponent))
            }
            SmallScaleBound::Moment { order, moment } => {
                let phi = moment * x0.powf(order);
                if phi >= T::one() {
                    T::infinity()
                } else {
                    phi / ((T::one() - q.powf(order)) * (T::one() - phi))
                }
            }
        }
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be a positive finite number, got {v}"
        )))
    }
}

impl<T: Real> DistributionSpec<T> {
    pub fn new(kind: LawKind<T>) -> Result<Self> {
        match kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                if !(p0 > T::zero() && p0 <= T::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "p0 must lie in (0, 1], got {p0}"
                    )));
                }
                positive("atom", atom)?;
            }
            LawKind::Exponential { rate } => positive("rate", rate)?,
            LawKind::Gamma { shape, rate } => {
                positive("shape", shape)?;
                positive("rate", rate)?;
            }
            LawKind::PowerOfHalfNormal { p } => positive("p", p)?,
            LawKind::StableTotallySkewed { alpha, k } => {
                if !(alpha > T::zero() && alpha < T::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha must lie in (0, 1), got {alpha}"
                    )));
                }
                positive("K", k)?;
            }
            LawKind::InverseWeibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
            LawKind::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "mu must be finite, got {mu}"
                    )));
                }
                positive("sigma", sigma)?;
            }
        }
        Ok(Self { kind })
    }

    pub fn bernoulli_at_zero(p0: T, atom: T) -> Result<Self> {
        Self::new(LawKind::BernoulliAtZero { p0, atom })
    }

    pub fn exponential(rate: T) -> Result<Self> {
        Self::new(LawKind::Exponential { rate })
    }

    pub fn gamma(shape: T, rate: T) -> Result<Self> {
        Self::new(LawKind::Gamma { shape, rate })
    }

    pub fn power_of_half_normal(p: T) -> Result<Self> {
        Self::new(LawKind::PowerOfHalfNormal { p })
    }

    pub fn stable(alpha: T, k: T) -> Result<Self> {
        Self::new(LawKind::StableTotallySkewed { alpha, k })
    }

    pub fn inverse_weibull(shape: T, scale: T) -> Result<Self> {
        Self::new(LawKind::InverseWeibull { shape, scale })
    }

    pub fn log_normal(mu: T, sigma: T) -> Result<Self> {
        Self::new(LawKind::LogNormal { mu, sigma })
    }

    pub fn kind(&self) -> &LawKind<T> {
        &self.kind
    }

    /// P(X ≤ ε).
    pub fn cdf(&self, eps: T) -> Result<T> {
        if eps.is_nan() {
            return Err(Error::Domain("cdf argument is NaN".into()));
        }
        if eps < T::zero() {
            return Ok(T::zero());
        }
        let v = match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                if eps < atom {
                    p0
                } else {
                    T::one()
                }
            }
            LawKind::Exponential { rate } => -(-rate * eps).exp_m1(),
            LawKind::Gamma { shape, rate } => gamma_p(shape, rate * eps),
            LawKind::PowerOfHalfNormal { p } => erf(eps.powf(p.recip()) * T::FRAC_1_SQRT_2()),
            LawKind::StableTotallySkewed { .. } => {
                let arg = self.levy_argument(eps)?;
                erfc(arg)
            }
            LawKind::InverseWeibull { shape, scale } => {
                if eps == T::zero() {
                    T::zero()
                } else {
                    (-(scale / eps).powf(shape)).exp()
                }
            }
            LawKind::LogNormal { mu, sigma } => {
                if eps == T::zero() {
                    T::zero()
                } else {
                    crate::special::normal_cdf((eps.ln() - mu) / sigma)
                }
            }
        };
        Ok(v)
    }

    /// ln P(X ≤ ε), finite wherever P(X ≤ ε) > 0 even when that value underflows.
    pub fn ln_cdf(&self, eps: T) -> Result<T> {
        if eps.is_nan() {
            return Err(Error::Domain("cdf argument is NaN".into()));
        }
        if eps < T::zero() {
            return Ok(T::neg_infinity());
        }
        let v = match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                if eps < atom {
                    p0.ln()
                } else {
                    T::zero()
                }
            }
            LawKind::Exponential { rate } => {
                let x = rate * eps;
                if x > T::one() {
                    (-(-x).exp()).ln_1p()
                } else {
                    (-(-x).exp_m1()).ln()
                }
            }
            LawKind::Gamma { shape, rate } => ln_gamma_p(shape, rate * eps),
            LawKind::PowerOfHalfNormal { p } => {
                if eps == T::zero() {
                    T::neg_infinity()
                } else {
                    ln_erf_from_ln(eps.ln() / p - T::LN_2() * T::lit(0.5))
                }
            }
            LawKind::StableTotallySkewed { .. } => ln_erfc(self.levy_argument(eps)?),
            LawKind::InverseWeibull { shape, scale } => {
                if eps == T::zero() {
                    T::neg_infinity()
                } else {
                    -(shape * (scale.ln() - eps.ln())).exp()
                }
            }
            LawKind::LogNormal { mu, sigma } => {
                if eps == T::zero() {
                    T::neg_infinity()
                } else {
                    ln_normal_cdf((eps.ln() - mu) / sigma)
                }
            }
        };
        Ok(v)
    }

    /// P(X > x), computed without cancellation in the upper tail.
    pub fn sf(&self, x: T) -> Result<T> {
        if x.is_nan() {
            return Err(Error::Domain("survival argument is NaN".into()));
        }
        if x < T::zero() {
            return Ok(T::one());
        }
        let v = match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                if x < atom {
                    T::one() - p0
                } else {
                    T::zero()
                }
            }
            LawKind::Exponential { rate } => (-rate * x).exp(),
            LawKind::Gamma { shape, rate } => gamma_q(shape, rate * x),
            LawKind::PowerOfHalfNormal { p } => erfc(x.powf(p.recip()) * T::FRAC_1_SQRT_2()),
            LawKind::StableTotallySkewed { .. } => {
                if x == T::zero() {
                    T::one()
                } else {
                    erf(self.levy_argument(x)?)
                }
            }
            LawKind::InverseWeibull { shape, scale } => {
                if x == T::zero() {
                    T::one()
                } else {
                    -(-(scale / x).powf(shape)).exp_m1()
                }
            }
            LawKind::LogNormal { mu, sigma } => {
                if x == T::zero() {
                    T::one()
                } else {
                    crate::special::normal_cdf(-(x.ln() - mu) / sigma)
                }
            }
        };
        Ok(v)
    }

    /// For the α = 1/2 stable law, P(X ≤ x) = erfc(K / (2√x)).
    fn levy_argument(&self, x: T) -> Result<T> {
        match self.kind {
            LawKind::StableTotallySkewed { alpha, k } if alpha == T::lit(0.5) => {
                if x == T::zero() {
                    Ok(T::infinity())
                } else {
                    Ok(k / (T::lit(2.0) * x.sqrt()))
                }
            }
            LawKind::StableTotallySkewed { alpha, .. } => Err(Error::Capability(format!(
                "closed-form distribution function is only available for alpha = 1/2 (got alpha = {alpha})"
            ))),
            _ => unreachable!("levy_argument called on a non-stable law"),
        }
    }

    /// Whether `cdf`, `ln_cdf` and `sf` are available.
    pub fn has_cdf(&self) -> bool {
        match self.kind {
            LawKind::StableTotallySkewed { alpha, .. } => alpha == T::lit(0.5),
            _ => true,
        }
    }

    /// Analytic lower-tail classification.
    pub fn classify_tail(&self) -> TailClass<T> {
        match self.kind {
            LawKind::BernoulliAtZero { p0, .. } => TailClass::AtomAtZero { p0 },
            LawKind::Exponential { .. } => TailClass::Polynomial { beta: T::one() },
            LawKind::Gamma { shape, .. } => TailClass::Polynomial { beta: shape },
            LawKind::PowerOfHalfNormal { p } => TailClass::Polynomial { beta: p.recip() },
            LawKind::StableTotallySkewed { alpha, k } => {
                let params = asymptotics::LaplaceScaleParams {
                    k_prime: k,
                    gamma_prime: alpha,
                };
                let (k, gamma) = asymptotics::exp_tail_transform(params)
                    .expect("validated stable parameters lie in the transform domain");
                TailClass::ExponentialSmall { k, gamma }
            }
            LawKind::InverseWeibull { shape, scale } => TailClass::ExponentialSmall {
                k: scale.powf(shape),
                gamma: shape,
            },
            LawKind::LogNormal { .. } => TailClass::Unclassified,
        }
    }

    /// E log max(X, 1) < ∞. Every catalog law satisfies it; see
    /// [`log_moment_finite`] for laws given only by a tail function.
    pub fn check_wellposed(&self) -> bool {
        true
    }

    /// E X, when finite.
    pub fn mean(&self) -> Option<T> {
        match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => Some((T::one() - p0) * atom),
            LawKind::Exponential { rate } => Some(rate.recip()),
            LawKind::Gamma { shape, rate } => Some(shape / rate),
            LawKind::PowerOfHalfNormal { p } => Some(half_normal_moment(p)),
            LawKind::StableTotallySkewed { .. } => None,
            LawKind::InverseWeibull { shape, scale } => {
                (shape > T::one()).then(|| scale * ln_gamma(T::one() - shape.recip()).exp())
            }
            LawKind::LogNormal { mu, sigma } => Some((mu + T::lit(0.5) * sigma * sigma).exp()),
        }
    }

    /// Some (order a ∈ (0, 1], E X^a) pair with finite moment.
    pub fn fractional_moment(&self) -> (T, T) {
        if let Some(m) = self.mean() {
            return (T::one(), m);
        }
        match self.kind {
            LawKind::StableTotallySkewed { alpha, k } => {
                let a = T::lit(0.5) * alpha;
                // E X^s = Γ(1 − s/α) / Γ(1 − s) · K^{s/α} for s < α
                let m = (ln_gamma(T::one() - a / alpha) - ln_gamma(T::one() - a)).exp()
                    * k.powf(a / alpha);
                (a, m)
            }
            LawKind::InverseWeibull { shape, scale } => {
                let a = (T::lit(0.5) * shape).min(T::one());
                (a, scale.powf(a) * ln_gamma(T::one() - a / shape).exp())
            }
            _ => unreachable!("laws without a finite mean are handled above"),
        }
    }

    pub(crate) fn small_scale_bound(&self) -> SmallScaleBound<T> {
        if let LawKind::StableTotallySkewed { alpha, k } = self.kind {
            return SmallScaleBound::Power {
                coef: k,
                exponent: alpha,
            };
        }
        match self.mean() {
            Some(slope) => SmallScaleBound::Linear { slope },
            None => {
                let (order, moment) = self.fractional_moment();
                SmallScaleBound::Moment { order, moment }
            }
        }
    }

    /// Essential supremum of X, when finite.
    pub fn support_upper(&self) -> Option<T> {
        match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                Some(if p0 == T::one() { T::zero() } else { atom })
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LawKind::BernoulliAtZero { .. } => "bernoulli",
            LawKind::Exponential { .. } => "exponential",
            LawKind::Gamma { .. } => "gamma",
            LawKind::PowerOfHalfNormal { .. } => "halfnormal-power",
            LawKind::StableTotallySkewed { .. } => "stable",
            LawKind::InverseWeibull { .. } => "inverse-weibull",
            LawKind::LogNormal { .. } => "lognormal",
        }
    }

    /// Parameters keyed by their wire names.
    pub fn params(&self) -> Vec<(&'static str, T)> {
        match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => vec![("p0", p0), ("a", atom)],
            LawKind::Exponential { rate } => vec![("rate", rate)],
            LawKind::Gamma { shape, rate } => vec![("shape", shape), ("rate", rate)],
            LawKind::PowerOfHalfNormal { p } => vec![("p", p)],
            LawKind::StableTotallySkewed { alpha, k } => vec![("alpha", alpha), ("K", k)],
            LawKind::InverseWeibull { shape, scale } => vec![("shape", shape), ("scale", scale)],
            LawKind::LogNormal { mu, sigma } => vec![("mu", mu), ("sigma", sigma)],
        }
    }
}

/// A representative set of catalog laws covering every tail class.
pub fn default_catalog<T: Real>() -> Vec<DistributionSpec<T>> {
    let l = T::lit;
    let kinds = [
        LawKind::BernoulliAtZero {
            p0: l(0.5),
            atom: l(1.0),
        },
        LawKind::BernoulliAtZero {
            p0: l(0.3),
            atom: l(2.0),
        },
        LawKind::Exponential { rate: l(1.0) },
        LawKind::Exponential { rate: l(2.5) },
        LawKind::Gamma {
            shape: l(2.0),
            rate: l(1.0),
        },
        LawKind::Gamma {
            shape: l(0.5),
            rate: l(3.0),
        },
        LawKind::PowerOfHalfNormal { p: l(2.0) },
        LawKind::PowerOfHalfNormal { p: l(0.5) },
        LawKind::StableTotallySkewed {
            alpha: l(0.5),
            k: l(1.0),
        },
        LawKind::StableTotallySkewed {
            alpha: l(0.3),
            k: l(2.0),
        },
        LawKind::StableTotallySkewed {
            alpha: l(0.7),
            k: l(0.5),
        },
        LawKind::InverseWeibull {
            shape: l(1.0),
            scale: l(1.0),
        },
        LawKind::InverseWeibull {
            shape: l(2.0),
            scale: l(0.5),
        },
        LawKind::LogNormal {
            mu: l(0.0),
            sigma: l(1.0),
        },
        LawKind::LogNormal {
            mu: l(0.5),
            sigma: l(0.5),
        },
    ];
    kinds
        .into_iter()
        .map(|k| DistributionSpec::new(k).expect("catalog parameters are valid"))
        .collect()
}

/// E|Z|^p = 2^{p/2} Γ((p+1)/2) / √π.
fn half_normal_moment<T: Real>(p: T) -> T {
    let half = T::lit(0.5);
    (half * p * T::LN_2() + ln_gamma(half * (p + T::one()))).exp() / T::PI().sqrt()
}

/// Decides E log max(X, 1) = ∫₀^∞ P(log X > u) du < ∞ for a law given by
/// `tail(u) = P(log X > u)`.
///
/// The integral is split into dyadic blocks [2^j, 2^{j+1}]; convergence is
/// accepted once the block masses contract geometrically and the projected
/// remainder is negligible. Slowly decaying tails such as 1/u are reported
/// as divergent.
pub fn log_moment_finite<T: Real, F: Fn(T) -> T>(tail: F) -> bool {
    const BLOCKS: usize = 48;
    let mut masses = Vec::with_capacity(BLOCKS);
    let mut total = T::zero();
    for j in 0..BLOCKS {
        let (a, b) = if j == 0 {
            (T::zero(), T::one())
        } else {
            (T::lit(2.0).powi(j as i32 - 1), T::lit(2.0).powi(j as i32))
        };
        let cells: Vec<T> = (0..=16)
            .map(|i| a + (b - a) * T::of_usize(i) / T::lit(16.0))
            .collect();
        let mass = match crate::quadrature::integrate(
            &tail,
            &cells,
            T::lit(1e-300),
            T::lit(1e-6),
            100_000,
        ) {
            Ok(r) => r.value,
            Err(_) => return false,
        };
        if !mass.is_finite() {
            return false;
        }
        total = total + mass;
        masses.push(mass);
        if j >= 4 {
            let recent = &masses[j - 3..=j];
            let ratio = recent
                .windows(2)
                .map(|w| {
                    if w[0] > T::zero() {
                        w[1] / w[0]
                    } else {
                        T::zero()
                    }
                })
                .fold(T::zero(), |m, r| m.max(r));
            if ratio < T::lit(0.9) {
                let remainder = mass * ratio / (T::one() - ratio);
                if remainder <= T::lit(1e-8) * total.max(T::one()) {
                    return true;
                }
            }
        }
    }
    false
}

/// Wire form `{"kind": string, "params": {name: number}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDistribution {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl<T: Real> TryFrom<RawDistribution> for DistributionSpec<T> {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let mut params = raw.params;
        let mut take = |name: &str, default: Option<f64>| -> Result<T> {
            match params.remove(name).or(default) {
                Some(v) => Ok(T::lit(v)),
                None => Err(Error::InvalidParameter(format!(
                    "{} requires parameter `{name}`",
                    raw.kind
                ))),
            }
        };
        let kind = match raw.kind.as_str() {
            "bernoulli" | "bernoulli-at-zero" => LawKind::BernoulliAtZero {
                p0: take("p0", None)?,
                atom: take("a", Some(1.0))?,
            },
            "exponential" => LawKind::Exponential {
                rate: take("rate", Some(1.0))?,
            },
            "gamma" => LawKind::Gamma {
                shape: take("shape", None)?,
                rate: take("rate", Some(1.0))?,
            },
            "halfnormal-power" | "power-half-normal" => LawKind::PowerOfHalfNormal {
                p: take("p", None)?,
            },
            "stable" => LawKind::StableTotallySkewed {
                alpha: take("alpha", None)?,
                k: take("K", Some(1.0))?,
            },
            "inverse-weibull" => LawKind::InverseWeibull {
                shape: take("shape", None)?,
                scale: take("scale", Some(1.0))?,
            },
            "lognormal" => LawKind::LogNormal {
                mu: take("mu", Some(0.0))?,
                sigma: take("sigma", Some(1.0))?,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown distribution kind `{other}`"
                )))
            }
        };
        if let Some(extra) = params.keys().next() {
            return Err(Error::InvalidParameter(format!(
                "unknown parameter `{extra}` for distribution `{}`",
                raw.kind
            )));
        }
        DistributionSpec::new(kind)
    }
}

impl<T: Real> From<&DistributionSpec<T>> for RawDistribution {
    fn from(spec: &DistributionSpec<T>) -> Self {
        RawDistribution {
            kind: spec.name().to_string(),
            params: spec
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.as_f64()))
                .collect(),
        }
    }
}

impl<T: Real> Serialize for DistributionSpec<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawDistribution::from(self).serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for DistributionSpec<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDistribution::deserialize(deserializer)?;
        DistributionSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// Mini-syntax `name:key=val,...`, e.g. `stable:alpha=0.5,K=1`.
impl<T: Real> FromStr for DistributionSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got `{pair}`"))
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("`{value}` is not a number")))?;
            params.insert(key.trim().to_string(), value);
        }
        DistributionSpec::try_from(RawDistribution {
            kind: kind.trim().to_string(),
            params,
        })
    }
}

impl<T: Real> fmt::Display for DistributionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name())?;
        for (i, (k, v)) in self.params().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
