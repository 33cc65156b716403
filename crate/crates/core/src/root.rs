//! Bracketed bisection for the implicit prey update.
//!
//! Every implicit update in the scheme has the form
//! `x * damping = rhs - loss(x)` with `loss >= 0` nondecreasing in `x`, so the
//! residual `rhs - loss(x) - damping * x` is strictly decreasing and has a
//! single root in `[0, rhs]` whenever it is nonnegative at zero.

use thiserror::Error;

/// Residual accepted as a root.
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RootError {
    #[error("root not bracketed: residual {at_lo:e} at lower end, {at_hi:e} at upper end")]
    NotBracketed { at_lo: f64, at_hi: f64 },
    #[error("bisection stopped with residual {residual:e}")]
    NotConverged { residual: f64 },
}

/// Root of a nonincreasing `residual` on `[lo, hi]`.
///
/// Bisects until the bracket collapses to adjacent floats (or the residual is
/// exactly zero), then returns the endpoint with the smaller residual. Fails
/// if that residual exceeds [`RESIDUAL_TOL`] while the bracket is still open.
pub fn bisect_decreasing(residual: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64, RootError> {
    let mut r_lo = residual(lo);
    let mut r_hi = residual(hi);
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    if !(r_lo > 0.0 && r_hi < 0.0) {
        return Err(RootError::NotBracketed {
            at_lo: r_lo,
            at_hi: r_hi,
        });
    }
    let mut collapsed = false;
    for _ in 0..MAX_ITERATIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            collapsed = true;
            break;
        }
        let r_mid = residual(mid);
        if r_mid == 0.0 {
            return Ok(mid);
        }
        if r_mid > 0.0 {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    let (root, r) = if r_lo.abs() <= r_hi.abs() {
        (lo, r_lo)
    } else {
        (hi, r_hi)
    };
    if collapsed || r.abs() <= RESIDUAL_TOL {
        Ok(root)
    } else {
        Err(RootError::NotConverged { residual: r })
    }
}

/// Solves `x * damping = rhs - loss(x)` on `[0, rhs]`.
pub fn solve_implicit_prey(rhs: f64, damping: f64, loss: impl Fn(f64) -> f64) -> Result<f64, RootError> {
    if rhs == 0.0 && loss(0.0) == 0.0 {
        return Ok(0.0);
    }
    bisect_decreasing(|x| rhs - loss(x) - damping * x, 0.0, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_equation() {
        // x * 1.1 = 3.3 - 0.0
        let x = solve_implicit_prey(3.3, 1.1, |_| 0.0).unwrap();
        assert!((x - 3.0).abs() < 1e-14);
    }

    #[test]
    fn saturating_loss() {
        let x = solve_implicit_prey(2.0, 1.2, |x| 0.4 * x / (1.0 + x)).unwrap();
        assert!((2.0 - 0.4 * x / (1.0 + x) - 1.2 * x).abs() <= RESIDUAL_TOL);
    }

    #[test]
    fn positive_loss_at_zero_is_not_bracketed() {
        let err = solve_implicit_prey(0.1, 1.0, |_| 0.5).unwrap_err();
        assert!(matches!(err, RootError::NotBracketed { .. }));
    }

    #[test]
    fn nan_residual_is_not_bracketed() {
        assert!(bisect_decreasing(|_| f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_rhs() {
        assert_eq!(solve_implicit_prey(0.0, 1.5, |x| x).unwrap(), 0.0);
    }
}
