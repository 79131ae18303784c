use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

type Spec = DistributionSpec<f64>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Composite Simpson rule; independent of the adaptive Gauss–Kronrod code.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[test]
fn log_laplace_examples() {
    let exp = Spec::exponential(1.0).unwrap();
    assert_eq!(exp.log_laplace(0.0).unwrap(), 0.0);

    let stable = Spec::stable(0.5, 1.0).unwrap();
    assert!((stable.log_laplace(4.0).unwrap() - 2.0).abs() < 1e-15);

    // oracle: ∫₀^∞ e^{−x} e^{−x} dx = 1/2 by Simpson on [0, 40]
    let oracle = -simpson(|x| (-2.0 * x).exp(), 0.0, 40.0, 40_000).ln();
    assert!((oracle - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((exp.log_laplace(1.0).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn log_laplace_rejects_negative_argument() {
    let exp = Spec::exponential(1.0).unwrap();
    assert!(matches!(exp.log_laplace(-1.0), Err(Error::Domain(_))));
}

#[test]
fn closed_forms() {
    let b = Spec::bernoulli_at_zero(0.3, 2.0).unwrap();
    let lam = 0.7_f64;
    assert!((b.log_laplace(lam).unwrap() + (0.3 + 0.7 * (-lam * 2.0).exp()).ln()).abs() < 1e-15);
    let g = Spec::gamma(2.0, 3.0).unwrap();
    assert!((g.log_laplace(6.0).unwrap() - 2.0 * 3.0_f64.ln()).abs() < 1e-14);
}

#[test]
fn quadrature_laws_match_reference_values() {
    // X = Z²: E e^{−λX} = (1 + 2λ)^{−1/2}
    let chi2 = Spec::power_of_half_normal(2.0).unwrap();
    for lam in [1e-3, 0.01, 1.0, 100.0, 1e4, 1e6] {
        let g = chi2.log_laplace_with_error(lam).unwrap();
        let want = 0.5 * (2.0 * lam).ln_1p();
        assert!(
            (g.value - want).abs() < 1e-12 * want.max(1.0),
            "λ={lam}: {} vs {want}",
            g.value
        );
        assert!(g.error < 1e-11);
    }
    // reference values computed with mpmath
    let half_normal = Spec::power_of_half_normal(1.0).unwrap();
    let inv_weibull = Spec::inverse_weibull(1.0, 1.0).unwrap();
    let cases = [
        (0.01, 0.045_840_285_267_260_74, 0.007_960_712_884_424_786),
        (1.0, 1.273_924_122_000_568_6, 0.647_874_464_449_318_2),
        (100.0, 18.258_041_966_811_91, 4.831_061_513_645_143),
        (1e4, 197.123_179_631_204_13, 9.436_131_734_620_91),
        (1e6, 1_995.973_569_964_438_7, 14.041_301_910_610_017),
    ];
    for (lam, iw, hn) in cases {
        let a = inv_weibull.log_laplace(lam).unwrap();
        let b = half_normal.log_laplace(lam).unwrap();
        assert!(
            (a - iw).abs() < 1e-11 * iw.max(1.0),
            "inverse Weibull λ={lam}: {a} vs {iw}"
        );
        assert!(
            (b - hn).abs() < 1e-11 * hn.max(1.0),
            "half-normal λ={lam}: {b} vs {hn}"
        );
    }
    let lognormal = Spec::log_normal(0.0, 1.0).unwrap();
    for (lam, want) in [
        (0.01, 0.016_263_221_755_967_295),
        (1.0, 0.962_972_400_500_303_8),
        (100.0, 9.850_133_281_654_552),
        (1e4, 34.429_581_912_102_167),
    ] {
        let g = lognormal.log_laplace(lam).unwrap();
        assert!(
            (g - want).abs() < 1e-10 * want.max(1.0),
            "lognormal λ={lam}: {g} vs {want}"
        );
    }
}

#[test]
fn log_laplace_is_monotone_and_concave() {
    let grid: Vec<f64> = (0..=60)
        .map(|i| 10f64.powf(-4.0 + i as f64 * 0.15))
        .collect();
    for law in default_catalog::<f64>() {
        assert_eq!(law.log_laplace(0.0).unwrap(), 0.0);
        let g: Vec<f64> = grid.iter().map(|&l| law.log_laplace(l).unwrap()).collect();
        for w in g.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{law}: not nondecreasing");
        }
        // concavity: slopes over consecutive chords are nonincreasing
        let slopes: Vec<f64> = grid
            .windows(2)
            .zip(g.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        for (i, s) in slopes.windows(2).enumerate() {
            let tol = 1e-9 * (1.0 + s[0].abs()) + 1e-10 / (grid[i + 2] - grid[i + 1]);
            assert!(
                s[1] <= s[0] + tol,
                "{law}: chord slopes increase at λ≈{}",
                grid[i + 1]
            );
        }
    }
}

#[test]
fn cdf_examples() {
    let exp = Spec::exponential(1.0).unwrap();
    assert_eq!(exp.cdf(0.0).unwrap(), 0.0);
    let b = Spec::bernoulli_at_zero(0.5, 1.0).unwrap();
    assert_eq!(b.cdf(0.3).unwrap(), 0.5);
    assert_eq!(b.cdf(1.0).unwrap(), 1.0);

    let levy = Spec::stable(0.5, 1.0).unwrap();
    let p = levy.cdf(0.01).unwrap();
    assert!(((p - 1.537_459_794_428_034_8e-12) / p).abs() < 1e-13);
    // cross-check: Lévy density with c = K²/2, f(x) = √(c/2π) x^{−3/2} e^{−c/(2x)}
    let c = 0.5_f64;
    let density = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (c / (2.0 * std::f64::consts::PI)).sqrt() * x.powf(-1.5) * (-c / (2.0 * x)).exp()
        }
    };
    let q = simpson(density, 0.0, 0.01, 200_000);
    assert!(((q - p) / p).abs() < 1e-8, "quadrature {q} vs erfc {p}");
}

#[test]
fn stable_cdf_only_for_half() {
    let s = Spec::stable(0.3, 1.0).unwrap();
    assert!(matches!(s.cdf(0.5), Err(Error::Capability(_))));
    assert!(matches!(s.ln_cdf(0.5), Err(Error::Capability(_))));
    assert!(!s.has_cdf());
}

#[test]
fn cdf_is_a_distribution_function() {
    let grid: Vec<f64> = (0..=200)
        .map(|i| 10f64.powf(-8.0 + i as f64 * 0.06))
        .collect();
    for law in default_catalog::<f64>().into_iter().filter(|l| l.has_cdf()) {
        let mut prev = 0.0;
        for &e in &grid {
            let p = law.cdf(e).unwrap();
            assert!((0.0..=1.0).contains(&p), "{law}: cdf({e}) = {p}");
            assert!(p >= prev, "{law}: cdf decreases at {e}");
            prev = p;
            let s = law.sf(e).unwrap();
            assert!((p + s - 1.0).abs() < 1e-12, "{law}: cdf + sf != 1 at {e}");
            let l = law.ln_cdf(e).unwrap();
            if p > 1e-300 {
                assert!(
                    (l - p.ln()).abs() < 1e-10 * l.abs().max(1.0),
                    "{law}: ln_cdf({e})"
                );
            }
        }
    }
}

#[test]
fn sampler_examples() {
    let degenerate = Spec::bernoulli_at_zero(1.0, 1.0).unwrap();
    let mut r = rng(7);
    for _ in 0..1000 {
        assert_eq!(degenerate.sample(&mut r), 0.0);
    }

    let exp = Spec::exponential(1.0).unwrap();
    let mut r = rng(11);
    let n = 1_000_000;
    let (mut sum, mut below) = (0.0, 0usize);
    for _ in 0..n {
        let x: f64 = exp.sample(&mut r);
        sum += x;
        below += usize::from(x <= 1.0);
    }
    assert!((sum / n as f64 - 1.0).abs() < 0.004);
    let p = exp.cdf(1.0).unwrap();
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((below as f64 / n as f64 - p).abs() < 3.0 * sigma);
}

/// Kolmogorov–Smirnov statistic against a continuous distribution function.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    let critical = 1.628 / (n as f64).sqrt(); // 99% asymptotic band
    for (i, law) in default_catalog::<f64>().into_iter().enumerate() {
        let mut r = rng(1000 + i as u64);
        let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut r)).collect();
        match law.kind() {
            LawKind::BernoulliAtZero { p0, .. } => {
                let zeros = xs.iter().filter(|&&x| x == 0.0).count() as f64 / n as f64;
                let sigma = (p0 * (1.0 - p0) / n as f64).sqrt();
                assert!((zeros - p0).abs() < 3.0 * sigma, "{law}");
            }
            LawKind::StableTotallySkewed { alpha, k } if *alpha != 0.5 => {
                // no closed-form cdf: check E e^{−X} = e^{−K} instead
                let m = xs.iter().map(|x| (-x).exp()).sum::<f64>() / n as f64;
                let sd = 0.5 / (n as f64).sqrt();
                assert!((m - (-k).exp()).abs() < 3.0 * sd, "{law}: {m}");
            }
            _ => {
                let d = ks_statistic(xs, |x| law.cdf(x).unwrap());
                assert!(d < critical, "{law}: KS statistic {d} exceeds {critical}");
            }
        }
    }
}

#[test]
fn classification_examples() {
    let b = Spec::bernoulli_at_zero(0.5, 1.0).unwrap();
    assert_eq!(b.classify_tail(), TailClass::AtomAtZero { p0: 0.5 });
    let h = Spec::power_of_half_normal(2.0).unwrap();
    assert_eq!(h.classify_tail(), TailClass::Polynomial { beta: 0.5 });
    let s = Spec::stable(0.5, 1.0).unwrap();
    match s.classify_tail() {
        TailClass::ExponentialSmall { k, gamma } => {
            assert!((k - 0.25).abs() < 1e-15 && (gamma - 1.0).abs() < 1e-15);
            // cross-check with the erfc tail: −log erfc(1/(2√ε))·ε → 1/4
            let eps = 1e-8;
            let v = -s.ln_cdf(eps).unwrap() * eps;
            assert!((v - 0.25).abs() < 1e-3);
        }
        other => panic!("unexpected class {other:?}"),
    }
    let g = Spec::gamma(3.0, 2.0).unwrap();
    assert_eq!(g.classify_tail(), TailClass::Polynomial { beta: 3.0 });
    let iw = Spec::inverse_weibull(2.0, 3.0).unwrap();
    assert_eq!(
        iw.classify_tail(),
        TailClass::ExponentialSmall { k: 9.0, gamma: 2.0 }
    );
    let ln = Spec::log_normal(0.0, 1.0).unwrap();
    assert_eq!(ln.classify_tail(), TailClass::Unclassified);
}

#[test]
fn tail_classes_match_cdf_behavior() {
    for law in default_catalog::<f64>().into_iter().filter(|l| l.has_cdf()) {
        match law.classify_tail() {
            TailClass::Polynomial { beta } => {
                let ratio = |e: f64| law.ln_cdf(e).unwrap() / e.ln();
                let r6 = ratio(1e-6);
                assert!((r6 - beta).abs() < 0.1 * beta, "{law}: {r6} vs {beta}");
                // the approach improves along the grid
                assert!((ratio(1e-6) - beta).abs() <= (ratio(1e-2) - beta).abs() + 1e-12);
            }
            TailClass::ExponentialSmall { k, gamma } => {
                let v = -law.ln_cdf(1e-6).unwrap() * 1e-6_f64.powf(gamma);
                assert!((v - k).abs() < 0.1 * k, "{law}: {v} vs {k}");
            }
            TailClass::AtomAtZero { p0 } => assert_eq!(law.cdf(0.0).unwrap(), p0),
            TailClass::Unclassified => {}
        }
    }
}

#[test]
fn well_posedness() {
    for law in default_catalog::<f64>() {
        assert!(law.check_wellposed());
    }
    // tabulated tail P(X > t) = 1/log t, i.e. P(log X > u) = min(1, 1/u)
    assert!(!log_moment_finite(|u: f64| (1.0 / u).min(1.0)));
    // exponential tail of log X: finite
    assert!(log_moment_finite(|u: f64| (-u).exp()));
    // P(log X > u) = u^{-2}: finite
    assert!(log_moment_finite(|u: f64| (u * u).recip().min(1.0)));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(Spec::bernoulli_at_zero(0.0, 1.0).is_err());
    assert!(Spec::bernoulli_at_zero(1.5, 1.0).is_err());
    assert!(Spec::bernoulli_at_zero(0.5, 0.0).is_err());
    assert!(Spec::exponential(-1.0).is_err());
    assert!(Spec::gamma(0.0, 1.0).is_err());
    assert!(Spec::power_of_half_normal(f64::NAN).is_err());
    assert!(Spec::stable(1.0, 1.0).is_err());
    assert!(Spec::stable(0.5, 0.0).is_err());
    assert!(Spec::inverse_weibull(1.0, -2.0).is_err());
    assert!(Spec::log_normal(f64::INFINITY, 1.0).is_err());
    assert!(Spec::log_normal(0.0, 0.0).is_err());
}

#[test]
fn wire_formats() {
    let s: DistributionSpec =
        serde_json::from_str(r#"{"kind": "stable", "params": {"alpha": 0.5, "K": 1}}"#).unwrap();
    assert_eq!(s, Spec::stable(0.5, 1.0).unwrap());
    let json = serde_json::to_value(s).unwrap();
    assert_eq!(json["kind"], "stable");
    assert_eq!(json["params"]["alpha"], 0.5);

    let b: DistributionSpec = "bernoulli:p0=0.5,a=1".parse().unwrap();
    assert_eq!(b, Spec::bernoulli_at_zero(0.5, 1.0).unwrap());
    let e: DistributionSpec = "exponential".parse().unwrap();
    assert_eq!(e, Spec::exponential(1.0).unwrap());
    for law in default_catalog::<f64>() {
        let back: DistributionSpec = law.to_string().parse().unwrap();
        assert_eq!(back, law);
        let back: DistributionSpec =
            serde_json::from_value(serde_json::to_value(law).unwrap()).unwrap();
        assert_eq!(back, law);
    }

    assert!("cauchy:x=1".parse::<DistributionSpec>().is_err());
    assert!("bernoulli:p0=2".parse::<DistributionSpec>().is_err());
    assert!("bernoulli:p0=0.5,b=3".parse::<DistributionSpec>().is_err());
    assert!("gamma:rate=1".parse::<DistributionSpec>().is_err());
    assert!("exponential:rate".parse::<DistributionSpec>().is_err());
    assert!(serde_json::from_str::<DistributionSpec>(
        r#"{"kind": "gamma", "params": {"shape": -1}}"#
    )
    .is_err());
}

#[test]
fn single_precision_catalog() {
    let exp = DistributionSpec::<f32>::exponential(1.0).unwrap();
    assert!((exp.log_laplace(1.0).unwrap() - std::f32::consts::LN_2).abs() < 1e-6);
    let chi2 = DistributionSpec::<f32>::power_of_half_normal(2.0).unwrap();
    let g = chi2.log_laplace(10.0).unwrap();
    assert!((g - 0.5 * 21f32.ln()).abs() < 1e-4, "{g}");
}
