//! Derivative-free one-dimensional search.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Extremum {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a) > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 {
        Extremum { arg: x1, value: f1 }
    } else {
        Extremum { arg: x2, value: f2 }
    };
    // The endpoints are candidates too: the optimum may sit on the boundary.
    for x in [a, b] {
        let v = f(x);
        if v < best.value {
            best = Extremum { arg: x, value: v };
        }
    }
    best
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Extremum {
    let e = golden_minimize(|x| -f(x), a, b, tol);
    Extremum {
        arg: e.arg,
        value: -e.value,
    }
}

/// Smallest `y` in `[lo, hi]` (to within `tol`) at which the monotone
/// predicate `above(y)` switches from false to true.
pub fn bisect_threshold(above: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    if !above(hi) {
        return Err(Error::Bracket(format!("predicate still false at bracket ceiling {hi}")));
    }
    if above(lo) {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Midpoint concavity on a sample of pairs: `f((a+b)/2) >= (f(a)+f(b))/2 - slack`.
pub fn midpoint_concave(f: impl Fn(f64) -> f64, pairs: &[(f64, f64)], slack: f64) -> bool {
    pairs
        .iter()
        .all(|&(a, b)| f(0.5 * (a + b)) >= 0.5 * (f(a) + f(b)) - slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_kink() {
        let e = golden_minimize(|x| (x - 0.3).abs(), -2.0, 5.0, 1e-10);
        assert!((e.arg - 0.3).abs() < 1e-9);
        let m = golden_maximize(|x| -(x + 1.0).powi(2), -3.0, 3.0, 1e-10);
        assert!((m.arg + 1.0).abs() < 1e-8 && m.value <= 0.0);
    }

    #[test]
    fn golden_boundary_optimum() {
        let e = golden_minimize(|x| x, 1.0, 2.0, 1e-9);
        assert_eq!(e.arg, 1.0);
    }

    #[test]
    fn bisect_sqrt_two() {
        let y = bisect_threshold(|y| y * y > 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((y - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect_threshold(|y| y > 5.0, 0.0, 2.0, 1e-12).is_err());
        assert_eq!(bisect_threshold(|_| true, 0.5, 2.0, 1e-12).unwrap(), 0.5);
    }
}
