//! One-dimensional maximization of unimodal functions: geometric bracketing
//! followed by golden-section search.

use crate::{Real, Result};

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Outcome of [`bracket_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket<T> {
    /// a < m < b with f(m) ≥ max(f(a), f(b)).
    Interior { a: T, m: T, b: T, fm: T },
    /// f kept increasing down to the lower limit.
    BelowRange,
    /// f kept increasing up to the upper limit.
    AboveRange,
}

/// Walks from `start` with doubling steps in the uphill direction until `f`
/// turns down, staying inside `[lo, hi]`.
pub fn bracket_max<T, F>(mut f: F, start: T, step: T, lo: T, hi: T) -> Result<Bracket<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let two = T::lit(2.0);
    let f0 = f(start)?;
    let right = (start + step).min(hi);
    let f_right = f(right)?;
    let (mut a, mut m, mut fm, dir) = if f_right >= f0 {
        (start, right, f_right, T::one())
    } else {
        (right, start, f0, -T::one())
    };
    let mut h = step;
    loop {
        h = h * two;
        let next = m + dir * h;
        if next <= lo || next >= hi {
            let edge = if dir > T::zero() { hi } else { lo };
            let fe = f(edge)?;
            if fe < fm {
                return Ok(order(a, m, edge, fm));
            }
            return Ok(if dir > T::zero() {
                Bracket::AboveRange
            } else {
                Bracket::BelowRange
            });
        }
        let fnext = f(next)?;
        if fnext < fm {
            return Ok(order(a, m, next, fm));
        }
        a = m;
        m = next;
        fm = fnext;
    }
}

fn order<T: Real>(x: T, m: T, y: T, fm: T) -> Bracket<T> {
    Bracket::Interior {
        a: x.min(y),
        m,
        b: x.max(y),
        fm,
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// stopping once the interval is shorter than `x_tol` or than a few ulps of
/// its endpoints.
pub fn golden_section_max<T, F>(mut f: F, a: T, b: T, x_tol: T) -> Result<Maximum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    let ulps = T::lit(8.0) * T::epsilon();
    while b - a > x_tol.max(ulps * a.abs().max(b.abs())) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok(Maximum {
        x,
        value,
        evaluations,
    })
}
