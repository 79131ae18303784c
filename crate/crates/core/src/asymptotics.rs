//! Closed-form predictors for −log P(S ≤ ε) and −log P(M ≤ ε) as ε → 0,
//! the exponential-tail parameter transform, and the logarithmic-regime
//! Tauberian map.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, LawKind, TailClass};
use crate::{Error, Real, Result};

/// Which functional of the weighted sequence is predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// S = Σ qⁿXₙ.
    Sum,
    /// M = supₙ qⁿXₙ.
    Sup,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Sum => "sum",
            Target::Sup => "sup",
        })
    }
}

/// Functional form of a predicted rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    /// c·log(1/ε)
    LogOrder,
    /// c·(log 1/ε)²
    LogSquared,
    /// c·(log 1/ε)³
    LogCubed,
    /// c·ε^{−γ}
    Power,
}

/// A predicted rate ε ↦ −log P(· ≤ ε), kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction<T = f64> {
    pub target: Target,
    pub shape: Shape,
    pub constant: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exponent: Option<T>,
}

impl<T: Real> AsymptoticPrediction<T> {
    fn new(target: Target, shape: Shape, constant: T, exponent: Option<T>) -> Result<Self> {
        if !(constant.is_finite() && constant > T::zero()) {
            return Err(Error::Domain(format!(
                "prediction constant must be positive, got {constant}"
            )));
        }
        Ok(Self {
            target,
            shape,
            constant,
            exponent,
        })
    }

    /// Predicted −log P(· ≤ ε) for ε ∈ (0, 1).
    pub fn evaluate(&self, eps: T) -> T {
        let log_inv = -eps.ln();
        match self.shape {
            Shape::LogOrder => self.constant * log_inv,
            Shape::LogSquared => self.constant * log_inv.powi(2),
            Shape::LogCubed => self.constant * log_inv.powi(3),
            Shape::Power => self.constant * eps.powf(-self.exponent.unwrap_or(T::one())),
        }
    }
}

impl<T: Real> fmt::Display for AsymptoticPrediction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.constant;
        match self.shape {
            Shape::LogOrder => write!(f, "{c}·log(1/ε)"),
            Shape::LogSquared => write!(f, "{c}·(log 1/ε)^2"),
            Shape::LogCubed => write!(f, "{c}·(log 1/ε)^3"),
            Shape::Power => write!(f, "{c}·ε^(-{})", self.exponent.unwrap_or(T::one())),
        }
    }
}

/// (K′, γ′) in G(λ) ∼ K′ λ^{γ′}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceScaleParams<T = f64> {
    pub k_prime: T,
    pub gamma_prime: T,
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if q > T::zero() && q < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must lie in (0, 1), got {q}")))
    }
}

fn log_order<T: Real>(target: Target, p0: T, q: T) -> Result<AsymptoticPrediction<T>> {
    if p0 >= T::one() {
        return Err(Error::Domain(
            "p0 = 1 gives a degenerate series that is identically zero".into(),
        ));
    }
    AsymptoticPrediction::new(target, Shape::LogOrder, -p0.ln() / -q.ln(), None)
}

fn unclassified() -> Error {
    Error::Capability("no prediction is available for an unclassified lower tail".into())
}

/// Rate for S = Σ qⁿXₙ from the lower-tail class of X.
pub fn predict_sum<T: Real>(tail: &TailClass<T>, q: T) -> Result<AsymptoticPrediction<T>> {
    check_q(q)?;
    match *tail {
        TailClass::AtomAtZero { p0 } => log_order(Target::Sum, p0, q),
        TailClass::Polynomial { beta } => AsymptoticPrediction::new(
            Target::Sum,
            Shape::LogSquared,
            beta / (T::lit(2.0) * -q.ln()),
            None,
        ),
        TailClass::ExponentialSmall { k, gamma } => {
            let one = T::one();
            let c = k / (one - q.powf(gamma / (one + gamma))).powf(one + gamma);
            AsymptoticPrediction::new(Target::Sum, Shape::Power, c, Some(gamma))
        }
        TailClass::Unclassified => Err(unclassified()),
    }
}

/// Rate for M = supₙ qⁿXₙ. Coincides with the sum for the atom and
/// polynomial classes; differs in the constant for exponentially small tails.
pub fn predict_sup<T: Real>(tail: &TailClass<T>, q: T) -> Result<AsymptoticPrediction<T>> {
    check_q(q)?;
    match *tail {
        TailClass::AtomAtZero { .. } | TailClass::Polynomial { .. } => {
            let sum = predict_sum(tail, q)?;
            Ok(AsymptoticPrediction {
                target: Target::Sup,
                ..sum
            })
        }
        TailClass::ExponentialSmall { k, gamma } => AsymptoticPrediction::new(
            Target::Sup,
            Shape::Power,
            k / (T::one() - q.powf(gamma)),
            Some(gamma),
        ),
        TailClass::Unclassified => Err(unclassified()),
    }
}

/// Log-normal X: −log P(S ≤ ε) ∼ (log 1/ε)³ / (6 log 1/q).
pub fn predict_sum_lognormal<T: Real>(q: T) -> Result<AsymptoticPrediction<T>> {
    check_q(q)?;
    AsymptoticPrediction::new(
        Target::Sum,
        Shape::LogCubed,
        (T::lit(6.0) * -q.ln()).recip(),
        None,
    )
}

/// Prediction for a catalog law, routing the log-normal sum to its
/// dedicated rate.
pub fn predict<T: Real>(
    dist: &DistributionSpec<T>,
    q: T,
    target: Target,
) -> Result<AsymptoticPrediction<T>> {
    let tail = dist.classify_tail();
    match (target, dist.kind()) {
        (Target::Sum, LawKind::LogNormal { .. }) => predict_sum_lognormal(q),
        (Target::Sum, _) => predict_sum(&tail, q),
        (Target::Sup, _) => predict_sup(&tail, q),
    }
}

/// G(λ) ∼ K′λ^{γ′} ⟺ −log P(X ≤ ε) ∼ K ε^{−γ}, with
/// K = (K′ γ′^{γ′} (1−γ′)^{1−γ′})^{1/(1−γ′)} and γ = γ′/(1−γ′).
pub fn exp_tail_transform<T: Real>(params: LaplaceScaleParams<T>) -> Result<(T, T)> {
    let LaplaceScaleParams {
        k_prime,
        gamma_prime: g,
    } = params;
    if !(g > T::zero() && g < T::one()) {
        return Err(Error::Domain(format!("gamma' must lie in (0, 1), got {g}")));
    }
    if !(k_prime > T::zero() && k_prime.is_finite()) {
        return Err(Error::Domain(format!("K' must be positive, got {k_prime}")));
    }
    let one = T::one();
    let inner = k_prime * g.powf(g) * (one - g).powf(one - g);
    Ok((inner.powf((one - g).recip()), g / (one - g)))
}

/// Inverse of [`exp_tail_transform`]: γ′ = γ/(1+γ),
/// K′ = K^{1−γ′} / (γ′^{γ′} (1−γ′)^{1−γ′}).
pub fn exp_tail_inverse<T: Real>(k: T, gamma: T) -> Result<LaplaceScaleParams<T>> {
    if !(k > T::zero() && k.is_finite() && gamma > T::zero() && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "K and gamma must be positive, got K = {k}, gamma = {gamma}"
        )));
    }
    let one = T::one();
    let g = gamma / (one + gamma);
    let k_prime = k.powf(one - g) / (g.powf(g) * (one - g).powf(one - g));
    Ok(LaplaceScaleParams {
        k_prime,
        gamma_prime: g,
    })
}

fn tauberian_guard<T: Real>(k: T, gamma: T) -> Result<(T, T)> {
    if !(gamma >= T::one()) {
        return Err(Error::Domain(format!(
            "logarithmic Tauberian map requires gamma >= 1, got {gamma}"
        )));
    }
    if !(k > T::zero()) {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    Ok((k, gamma))
}

/// −log E e^{−λS} ∼ K (log λ)^γ  ⟹  −log P(S ≤ ε) ∼ K (log 1/ε)^γ, γ ≥ 1.
pub fn tauberian_tail_from_laplace<T: Real>(k: T, gamma: T) -> Result<(T, T)> {
    tauberian_guard(k, gamma)
}

/// Converse direction of [`tauberian_tail_from_laplace`].
pub fn tauberian_laplace_from_tail<T: Real>(k: T, gamma: T) -> Result<(T, T)> {
    tauberian_guard(k, gamma)
}
