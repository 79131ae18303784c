//! Error function and incomplete gamma function, including log-domain
//! variants that stay finite where the plain values underflow.

use crate::Real;

const MAX_ITER: usize = 500;

/// erf(x) = 2/√π · e^{−x²} · Σ 2ⁿ x^{2n+1} / (1·3···(2n+1)); all terms positive.
fn erf_series<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        term = term * two * x2 / T::of_usize(2 * n + 1);
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x2).exp() * sum
}

/// Continued fraction K(x) with erfc(x) = e^{−x²} K(x) / √π, valid for x > 0.
///
/// K(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), evaluated by modified Lentz.
fn erfc_fraction<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let half = T::lit(0.5);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..MAX_ITER {
        let a = half * T::of_usize(n);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    f.recip()
}

const FRACTION_CUTOFF: f64 = 2.0;

pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return -erf(-x);
    }
    if x < T::lit(2.5) {
        erf_series(x)
    } else {
        T::one() - erfc(x)
    }
}

pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return T::lit(2.0) - erfc(-x);
    }
    if x < T::lit(FRACTION_CUTOFF) {
        T::one() - erf_series(x)
    } else {
        (-x * x).exp() * erfc_fraction(x) / T::PI().sqrt()
    }
}

/// ln erfc(x), finite for every finite x.
pub fn ln_erfc<T: Real>(x: T) -> T {
    if x < T::zero() {
        (T::lit(2.0) - erfc(-x)).ln()
    } else if x < T::lit(FRACTION_CUTOFF) {
        (-erf_series(x)).ln_1p()
    } else {
        -x * x + erfc_fraction(x).ln() - T::PI().sqrt().ln()
    }
}

/// ln erf(e^{ln_x}) for x > 0, taking the argument in log form so tiny
/// arguments never underflow.
pub fn ln_erf_from_ln<T: Real>(ln_x: T) -> T {
    if ln_x < T::lit(-30.0) {
        // erf(x) = 2x/√π (1 − x²/3 + ...), correction below machine precision
        T::FRAC_2_SQRT_PI().ln() + ln_x
    } else {
        let x = ln_x.exp();
        if x < T::lit(FRACTION_CUTOFF) {
            erf_series(x).ln()
        } else {
            (-erfc(x)).ln_1p()
        }
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos approximation).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        return (T::PI() / (T::PI() * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::of_usize(i));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

/// Series Σ xⁿ / (a(a+1)···(a+n)), so that P(a, x) = x^a e^{−x} / Γ(a) · series.
fn gamma_series<T: Real>(a: T, x: T) -> T {
    let mut ap = a;
    let mut term = a.recip();
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum
}

/// Continued fraction for Q(a, x) without the prefactor x^a e^{−x} / Γ(a).
fn gamma_fraction<T: Real>(a: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - a;
    let mut c = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = T::of_usize(i);
        let an = -i * (i - a);
        b = b + T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    h
}

fn ln_prefactor<T: Real>(a: T, x: T) -> T {
    a * x.ln() - x - ln_gamma(a)
}

/// ln P(a, x), the log of the regularized lower incomplete gamma function.
pub fn ln_gamma_p<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::neg_infinity();
    }
    if x < a + T::one() {
        ln_prefactor(a, x) + gamma_series(a, x).ln()
    } else {
        (-gamma_q(a, x)).ln_1p()
    }
}

/// Regularized lower incomplete gamma function P(a, x).
pub fn gamma_p<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x < a + T::one() {
        (ln_prefactor(a, x) + gamma_series(a, x).ln()).exp()
    } else {
        T::one() - gamma_q(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 − P(a, x).
pub fn gamma_q<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        T::one()
    } else if x < a + T::one() {
        T::one() - gamma_p(a, x)
    } else {
        ln_prefactor(a, x).exp() * gamma_fraction(a, x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf<T: Real>(z: T) -> T {
    T::lit(0.5) * erfc(-z * T::FRAC_1_SQRT_2())
}

/// ln Φ(z), accurate far into the lower tail.
pub fn ln_normal_cdf<T: Real>(z: T) -> T {
    ln_erfc(-z * T::FRAC_1_SQRT_2()) - T::LN_2()
}
