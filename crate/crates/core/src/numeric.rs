//! Small scalar root-finding helpers shared by the closed-form layers.

use crate::{Error, Result};

/// Absolute tolerance on the argument of a bisection.
pub(crate) const BISECTION_TOL: f64 = 1e-13;
pub(crate) const BISECTION_MAX_ITER: usize = 200;

/// Solves `f(x) = target` on `[lo, hi]` for a nondecreasing `f`.
///
/// Iteration continues until the bracket can no longer be split in double
/// precision. If that takes more than [`BISECTION_MAX_ITER`] steps (targets
/// near subnormal range), the midpoint is accepted once the bracket is within
/// [`BISECTION_TOL`].
pub(crate) fn bisect_increasing<F>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    what: &'static str,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo <= target + BISECTION_TOL && target <= f_hi + BISECTION_TOL) {
        return Err(Error::NoConvergence(what));
    }
    if target <= f_lo {
        return Ok(lo);
    }
    if target >= f_hi {
        return Ok(hi);
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= BISECTION_TOL {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NoConvergence(what))
    }
}
