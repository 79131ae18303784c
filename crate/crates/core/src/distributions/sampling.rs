use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{DistributionSpec, LawKind};
use crate::Real;

impl<T: Real> DistributionSpec<T> {
    /// One draw from the law. The generator is owned by the caller.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        T::lit(self.sample_f64(rng))
    }

    fn sample_f64<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            LawKind::BernoulliAtZero { p0, atom } => {
                if rng.random::<f64>() < p0.as_f64() {
                    0.0
                } else {
                    atom.as_f64()
                }
            }
            LawKind::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate.as_f64()
            }
            LawKind::Gamma { shape, rate } => Gamma::new(shape.as_f64(), 1.0 / rate.as_f64())
                .expect("validated gamma parameters")
                .sample(rng),
            LawKind::PowerOfHalfNormal { p } => {
                let z: f64 = StandardNormal.sample(rng);
                z.abs().powf(p.as_f64())
            }
            LawKind::StableTotallySkewed { alpha, k } => {
                let alpha = alpha.as_f64();
                k.as_f64().powf(1.0 / alpha) * positive_stable(alpha, rng)
            }
            LawKind::InverseWeibull { shape, scale } => {
                let e: f64 = Exp1.sample(rng);
                scale.as_f64() * e.powf(-1.0 / shape.as_f64())
            }
            LawKind::LogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu.as_f64() + sigma.as_f64() * z).exp()
            }
        }
    }
}

/// Kanter's representation of the positive stable law with E e^{−λX} = e^{−λ^α}:
/// X = (A(U)/E)^{(1−α)/α}, U uniform on (0, π), E standard exponential, where
/// A(u) = [sin(αu)^α sin((1−α)u)^{1−α} / sin u]^{1/(1−α)}.
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let u = loop {
        let u = rng.random::<f64>() * PI;
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let a = ((alpha * u).sin().powf(alpha) * ((1.0 - alpha) * u).sin().powf(1.0 - alpha) / u.sin())
        .powf(1.0 / (1.0 - alpha));
    (a / e).powf((1.0 - alpha) / alpha)
}
