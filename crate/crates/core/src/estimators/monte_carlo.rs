use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_epsilon, EstimateError, Method, TailEstimate};
use crate::asymptotics::Target;
use crate::series::{SeriesSpec, MAX_TERMS};
use crate::{Error, Real, Result};

/// Samples per chunk; each chunk draws from its own generator stream, so
/// results do not depend on the number of workers.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Minimum number of expected hits before an estimate is attempted.
pub const MIN_EXPECTED_HITS: f64 = 10.0;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig<T = f64> {
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Truncation tolerance relative to ε for the sum.
    pub trunc_tol: T,
}

impl<T: Real> MonteCarloConfig<T> {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        MonteCarloConfig {
            n_samples,
            seed,
            workers: 1,
            trunc_tol: T::lit(1e-6),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_trunc_tol(mut self, trunc_tol: T) -> Self {
        self.trunc_tol = trunc_tol;
        self
    }
}

/// Frequency of {Σ_{n≤N} qⁿXₙ ≤ ε}.
///
/// With a finite mean, N is the smallest depth with q^{N+1} E X/(1 − q) ≤
/// trunc_tol·ε. Otherwise N makes P(Σ_{n>N} qⁿXₙ > trunc_tol·ε) ≤ 1/(10n) via
/// Markov's inequality on a fractional moment E X^a (a ≤ 1, so the moment of
/// the tail sum is at most the sum of the moments). Truncation can only
/// raise the frequency.
pub fn sum_monte_carlo<T: Real>(
    series: &SeriesSpec<T>,
    eps: T,
    config: &MonteCarloConfig<T>,
) -> Result<TailEstimate<T>> {
    check_epsilon(eps)?;
    check_config(config)?;
    let q = series.q();
    let dist = series.dist();
    let budget = config.trunc_tol * eps;
    let n = T::lit(config.n_samples as f64);
    let depth = match dist.mean() {
        Some(mean) => depth_until(q, |w| w * q * mean / (T::one() - q) <= budget)?,
        None => {
            let (a, m) = dist.fractional_moment();
            let qa = q.powf(a);
            depth_until(q, |w| {
                m * (w * q).powf(a) / ((T::one() - qa) * budget.powf(a))
                    <= (T::lit(10.0) * n).recip()
            })?
        }
    };
    let weights = weights(q, depth);
    let hit = |rng: &mut ChaCha8Rng| {
        let mut s = T::zero();
        for &w in &weights {
            s = s + w * dist.sample(rng);
            if s > eps {
                return false;
            }
        }
        true
    };
    run(Target::Sum, eps, config, depth, hit)
}

/// Frequency of {max_{n≤N} qⁿXₙ ≤ ε}.
///
/// For bounded X every term beyond the last with qⁿ·sup X > ε is below ε,
/// so the truncation is exact. Otherwise N makes
/// Σ_{n>N} P(qⁿX > ε) ≤ 1/(10n) via Markov's inequality.
pub fn sup_monte_carlo<T: Real>(
    series: &SeriesSpec<T>,
    eps: T,
    config: &MonteCarloConfig<T>,
) -> Result<TailEstimate<T>> {
    check_epsilon(eps)?;
    check_config(config)?;
    let q = series.q();
    let dist = series.dist();
    let n = T::lit(config.n_samples as f64);
    let depth = match dist.support_upper() {
        Some(b) => depth_until(q, |w| w * q * b <= eps)?,
        None => {
            let (a, m) = dist.fractional_moment();
            let qa = q.powf(a);
            depth_until(q, |w| {
                m * (w * q / eps).powf(a) / (T::one() - qa) <= (T::lit(10.0) * n).recip()
            })?
        }
    };
    let weights = weights(q, depth);
    let hit = |rng: &mut ChaCha8Rng| weights.iter().all(|&w| w * dist.sample(rng) <= eps);
    run(Target::Sup, eps, config, depth, hit)
}

fn check_config<T: Real>(config: &MonteCarloConfig<T>) -> Result<()> {
    if config.n_samples == 0 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    if !(config.trunc_tol > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "truncation tolerance must be positive, got {}",
            config.trunc_tol
        )));
    }
    Ok(())
}

/// Smallest N such that `done(q^N)` holds.
fn depth_until<T: Real>(q: T, done: impl Fn(T) -> bool) -> Result<usize> {
    let mut w = T::one();
    for n in 0..MAX_TERMS {
        if done(w) {
            return Ok(n);
        }
        w = w * q;
    }
    Err(Error::NonConvergence {
        partial: f64::NAN,
        remainder: f64::INFINITY,
        terms: MAX_TERMS,
    })
}

fn weights<T: Real>(q: T, depth: usize) -> Vec<T> {
    std::iter::successors(Some(T::one()), |w| Some(*w * q))
        .take(depth + 1)
        .collect()
}

fn chunk_hits(
    seed: u64,
    chunk: u64,
    len: u64,
    hit: &(impl Fn(&mut ChaCha8Rng) -> bool + Sync),
) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    (0..len).map(|_| u64::from(hit(&mut rng))).sum()
}

fn run<T: Real>(
    target: Target,
    eps: T,
    config: &MonteCarloConfig<T>,
    depth: usize,
    hit: impl Fn(&mut ChaCha8Rng) -> bool + Sync,
) -> Result<TailEstimate<T>> {
    let n = config.n_samples;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let len = |c: u64| CHUNK_SIZE.min(n - c * CHUNK_SIZE);

    let pilot = chunk_hits(config.seed, 0, len(0), &hit);
    let expected = pilot as f64 * n as f64 / len(0) as f64;
    if expected < MIN_EXPECTED_HITS {
        return Err(Error::RareEvent {
            expected_hits: expected,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let rest: u64 = pool.install(|| {
        (1..chunks)
            .into_par_iter()
            .map(|c| chunk_hits(config.seed, c, len(c), &hit))
            .sum()
    });
    let hits = pilot + rest;
    if (hits as f64) < MIN_EXPECTED_HITS {
        return Err(Error::RareEvent {
            expected_hits: hits as f64,
        });
    }

    let (p_hat, p_lo, p_hi) = wilson(hits, n);
    let half_width = T::lit(0.5 * (p_hi.ln() - p_lo.ln()));
    Ok(TailEstimate {
        target,
        epsilon: eps,
        neg_log_p: T::lit(-p_hat.ln()).max(T::zero()),
        method: Method::MonteCarlo,
        error: EstimateError::Confidence {
            p_hat: T::lit(p_hat),
            p_lo: T::lit(p_lo),
            p_hi: T::lit(p_hi),
            half_width,
            hits,
            n_samples: n,
            seed: config.seed,
        },
        truncation: Some(depth),
        lambda_star: None,
        unbracketed: false,
    })
}

/// Wilson score interval at the 99% level.
pub(crate) fn wilson(hits: u64, n: u64) -> (f64, f64, f64) {
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (p, (center - half).max(0.0), (center + half).min(1.0))
}
