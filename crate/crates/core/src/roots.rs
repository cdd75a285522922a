//! Bracketing solvers for monotone scalar functions and a golden-section
//! maximiser for unimodal ones.

use crate::error::{Error, Result};

/// Bisection on an increasing function `f` with `f(lo) < 0 <= f(hi)`.
///
/// Runs until the bracket stops shrinking in floating point, the width
/// drops below `abs_tol`, or `max_iter` halvings are spent. Returns the
/// final bracket `(lo, hi)`; `hi` always satisfies `f(hi) >= 0`.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, abs_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= abs_tol {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Grows `[lo, hi]` until an increasing `f` changes sign across it.
///
/// `lo` moves down and `hi` moves up geometrically (relative to `anchor`)
/// but never past `min`/`max`.
pub fn bracket_increasing<F>(mut f: F, anchor: f64, min: f64, max: f64, what: &str) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut lo = anchor.clamp(min, max);
    let mut hi = lo;
    let mut step = 1.0;
    let mut f_lo = f(lo);
    while f_lo >= 0.0 || f_lo.is_nan() {
        if lo <= min {
            return Err(Error::BracketFailure(format!("{what}: no point below the root above {min}")));
        }
        hi = lo;
        lo = (lo - step).max(min);
        step *= 2.0;
        f_lo = f(lo);
    }
    step = 1.0;
    let mut f_hi = if hi == lo { f(hi) } else { 0.0 };
    if hi == lo {
        while f_hi < 0.0 || f_hi.is_nan() {
            if hi >= max {
                return Err(Error::BracketFailure(format!("{what}: no sign change below {max}")));
            }
            lo = hi;
            hi = (hi + step).min(max);
            step *= 2.0;
            f_hi = f(hi);
        }
    }
    Ok((lo, hi))
}

/// Locates the maximiser of a unimodal `f` on `[a, b]`.
///
/// The search starts at `x0` with initial step `h`, walks uphill with a
/// doubling step until the function drops (or a domain end is hit) and
/// then refines with golden-section search. Values of `-inf` are allowed
/// anywhere except at the returned point of a non-degenerate integrand.
pub fn unimodal_argmax<F>(f: &F, a: f64, b: f64, x0: f64, h: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let x0 = x0.clamp(a, b);
    let f0 = f(x0);
    let right = (x0 + h).min(b);
    let left = (x0 - h).max(a);
    let fr = if right > x0 { f(right) } else { f64::NEG_INFINITY };
    let fl = if left < x0 { f(left) } else { f64::NEG_INFINITY };

    let (lo, hi) = if fr > f0 {
        march(f, x0, right, fr, h, b)
    } else if fl > f0 {
        march(f, x0, left, fl, -h, a)
    } else {
        (left, right)
    };
    golden_max(f, lo.min(hi), lo.max(hi))
}

// Walks from `prev` through `cur` (which is higher) with doubling steps
// until the value drops, returning an interval known to contain the peak.
fn march<F: Fn(f64) -> f64>(f: &F, mut prev: f64, mut cur: f64, mut f_cur: f64, mut step: f64, end: f64) -> (f64, f64) {
    loop {
        step *= 2.0;
        let next = if step > 0.0 { (cur + step).min(end) } else { (cur + step).max(end) };
        if next == cur {
            return (prev, cur);
        }
        let f_next = f(next);
        if f_next <= f_cur {
            return (prev, next);
        }
        prev = cur;
        cur = next;
        f_cur = f_next;
    }
}

/// Golden-section maximisation on `[lo, hi]`. Returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
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
    // The endpoints may beat the interior probes when the peak sits on the boundary.
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let (lo, hi) = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0, 0.0, 200);
        assert!((hi - 2f64.sqrt()).abs() < 1e-15);
        assert!(lo <= hi);
    }

    #[test]
    fn bracket_then_bisect() {
        let f = |x: f64| x - 1234.5;
        let (lo, hi) = bracket_increasing(f, 1.0, 0.0, 1e8, "test").unwrap();
        assert!(f(lo) < 0.0 && f(hi) >= 0.0);
        let (_, root) = bisect_increasing(f, lo, hi, 0.0, 200);
        assert!((root - 1234.5).abs() < 1e-9);
        assert!(bracket_increasing(f, 1.0, 0.0, 100.0, "test").is_err());
    }

    #[test]
    fn argmax_of_narrow_far_peak() {
        let f = |x: f64| -((x - 5.0e5) / 0.01).powi(2);
        let (x, _) = unimodal_argmax(&f, f64::NEG_INFINITY, f64::INFINITY, 0.0, 1.0);
        assert!((x - 5.0e5).abs() < 1e-6);
        // boundary maximum
        let g = |x: f64| x;
        let (x, _) = unimodal_argmax(&g, 0.0, 3.0, 1.0, 0.5);
        assert_eq!(x, 3.0);
    }
}
