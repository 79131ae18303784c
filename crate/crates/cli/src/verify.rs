use serde::Serialize;
use smalldev::asymptotics::{
    exp_tail_inverse, exp_tail_transform, predict, tauberian_laplace_from_tail,
    tauberian_tail_from_laplace, LaplaceScaleParams, Target,
};
use smalldev::distributions::{default_catalog, DistributionSpec};
use smalldev::series::SeriesSpec;

pub const QS: [f64; 3] = [0.3, 0.5, 0.9];
pub const BRACKET_LAMBDAS: [f64; 4] = [1.5, 10.0, 1e3, 1e5];
pub const FE_LAMBDAS: [f64; 3] = [0.5, 3.0, 1e3];
pub const F_TOL: f64 = 1e-10;
pub const CLOSURE_TOL: f64 = 1e-10;
pub const ROUND_TRIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Check::new(name, false, err.to_string())
    }
}

/// Which laws and weight ratios to check, and the optional functional
/// equation perturbation.
pub struct Plan {
    pub laws: Vec<DistributionSpec>,
    pub qs: Vec<f64>,
    pub perturb_q: Option<f64>,
}

impl Plan {
    pub fn new(dist: Option<DistributionSpec>, q: Option<f64>, perturb_q: Option<f64>) -> Self {
        Plan {
            laws: dist.map_or_else(default_catalog, |d| vec![d]),
            qs: q.map_or_else(|| QS.to_vec(), |q| vec![q]),
            perturb_q,
        }
    }
}

pub fn run(plan: &Plan) -> Vec<Check> {
    let mut checks = Vec::new();
    for law in &plan.laws {
        for &q in &plan.qs {
            let tag = format!("{law} q={q}");
            match SeriesSpec::new(q, *law) {
                Ok(series) => {
                    checks.extend(bracket_checks(&series, &tag));
                    checks.extend(functional_equation_checks(&series, &tag, plan.perturb_q));
                }
                Err(e) => checks.push(Check::failed(format!("series {tag}"), e)),
            }
        }
    }
    checks.extend(stable_closure_checks(&plan.qs));
    checks.extend(round_trip_checks());
    checks.extend(tauberian_checks());
    checks
}

fn bracket_checks(series: &SeriesSpec, tag: &str) -> Vec<Check> {
    BRACKET_LAMBDAS
        .iter()
        .map(|&lambda| {
            let name = format!("bracket {tag} lambda={lambda}");
            let result = series
                .f_bracket(lambda)
                .and_then(|b| series.f_exact(lambda, F_TOL).map(|f| (b, f)));
            match result {
                Ok((b, f)) => {
                    let slack = f.error;
                    let ok = b.lo <= f.value + slack && f.value - slack <= b.hi;
                    Check::new(name, ok, format!("lo={} F={} hi={}", b.lo, f.value, b.hi))
                }
                Err(e) => Check::failed(name, e),
            }
        })
        .collect()
}

fn functional_equation_checks(
    series: &SeriesSpec,
    tag: &str,
    perturb_q: Option<f64>,
) -> Vec<Check> {
    let shift = perturb_q.unwrap_or(series.q());
    FE_LAMBDAS
        .iter()
        .map(|&lambda| {
            let name = format!("functional-equation {tag} lambda={lambda}");
            match series.functional_equation_residual(lambda, F_TOL, shift) {
                Ok(r) => Check::new(name, r <= 3.0 * F_TOL, format!("residual={r:e}")),
                Err(e) => Check::failed(name, e),
            }
        })
        .collect()
}

/// A stable series is stable with coefficient K′/(1 − q^α), so the Power
/// constant of the sum follows from the transform applied directly.
fn stable_closure_checks(qs: &[f64]) -> Vec<Check> {
    let mut checks = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for &q in qs {
            let name = format!("stable-closure alpha={alpha} q={q}");
            let result = DistributionSpec::stable(alpha, 1.0)
                .and_then(|d| predict(&d, q, Target::Sum))
                .and_then(|p| {
                    let (k, _) = exp_tail_transform(LaplaceScaleParams {
                        k_prime: 1.0 / (1.0 - q.powf(alpha)),
                        gamma_prime: alpha,
                    })?;
                    Ok((p.constant, k))
                });
            checks.push(match result {
                Ok((predicted, closed)) => {
                    let rel = (predicted - closed).abs() / closed;
                    Check::new(
                        name,
                        rel <= CLOSURE_TOL,
                        format!("predicted={predicted} closed_form={closed} rel={rel:e}"),
                    )
                }
                Err(e) => Check::failed(name, e),
            });
        }
    }
    checks
}

fn round_trip_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for k in [0.25_f64, 1.0, 3.0, 10.0] {
        for gamma in [0.2_f64, 1.0, 2.5, 5.0] {
            let name = format!("transform-round-trip K={k} gamma={gamma}");
            let result = exp_tail_inverse(k, gamma).and_then(exp_tail_transform);
            checks.push(match result {
                Ok((k2, g2)) => {
                    let err = ((k2 - k) / k).abs().max(((g2 - gamma) / gamma).abs());
                    Check::new(name, err <= ROUND_TRIP_TOL, format!("rel={err:e}"))
                }
                Err(e) => Check::failed(name, e),
            });
        }
    }
    checks
}

fn tauberian_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for gamma in [0.5, 0.99] {
        let rejected = tauberian_tail_from_laplace(1.0, gamma).is_err()
            && tauberian_laplace_from_tail(1.0, gamma).is_err();
        checks.push(Check::new(
            format!("tauberian-guard gamma={gamma}"),
            rejected,
            "rejects gamma < 1",
        ));
    }
    for gamma in [1.0, 2.0, 3.0] {
        let identity = tauberian_tail_from_laplace(0.7, gamma) == Ok((0.7, gamma))
            && tauberian_laplace_from_tail(0.7, gamma) == Ok((0.7, gamma));
        checks.push(Check::new(
            format!("tauberian-identity gamma={gamma}"),
            identity,
            "identity for gamma >= 1",
        ));
    }
    checks
}
