//! Small numerical kernels shared by the channel and optimizer modules.

use crate::error::{Error, Result};

#[inline]
pub(crate) fn ln_factorial(y: u64) -> f64 {
    if y < 2 {
        0.0
    } else {
        libm::lgamma(y as f64 + 1.0)
    }
}

/// `log(sum(exp(xs)))`, accurate when one term dominates: the remainder is
/// accumulated relative to the largest term and added with `ln_1p`.
pub(crate) fn logsumexp(xs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    let mut arg = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        if x > m {
            m = x;
            arg = i;
        }
    }
    if !m.is_finite() {
        return m;
    }
    let mut rest = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if i != arg {
            rest += libm::exp(x - m);
        }
    }
    m + libm::log1p(rest)
}

/// Bisection for a continuous `f` with a sign change on `[lo, hi]`.
pub(crate) fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Local maximizer of `f` on `[lo, hi]` reached by climbing from `x0`:
/// steps of doubling length in the ascent direction bracket the maximum,
/// then golden-section search refines it. Returns `(argmax, max)`.
pub(crate) fn climb<F: FnMut(f64) -> f64>(mut f: F, x0: f64, lo: f64, hi: f64, step: f64, xtol: f64) -> (f64, f64) {
    let f0 = f(x0);
    let probe = |x: f64| x.clamp(lo, hi);
    let (right, left) = (probe(x0 + step), probe(x0 - step));
    let (fr, fl) = (f(right), f(left));
    if f0 >= fr && f0 >= fl {
        if right - left <= xtol {
            return (x0, f0);
        }
        return golden(&mut f, left, right, xtol, (x0, f0));
    }
    let dir = if fr > fl { 1.0 } else { -1.0 };
    let (mut prev, mut x, mut fx) = (x0, if dir > 0.0 { right } else { left }, fr.max(fl));
    let mut h = step;
    loop {
        h *= 2.0;
        let next = probe(x + dir * h);
        if next == x {
            // climbed onto the boundary
            return (x, fx);
        }
        let fnext = f(next);
        if fnext <= fx {
            let (a, b) = if dir > 0.0 { (prev, next) } else { (next, prev) };
            return golden(&mut f, a, b, xtol, (x, fx));
        }
        prev = x;
        x = next;
        fx = fnext;
    }
}

fn golden<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64, xtol: f64, best: (f64, f64)) -> (f64, f64) {
    let (mut best_x, mut best_v) = best;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    (best_x, best_v)
}
