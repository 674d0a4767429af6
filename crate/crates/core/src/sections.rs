//! p-Fibonacci section ratios.
//!
//! Cutting a unit segment at `1/α` so that `α^p` equals the ratio of the two
//! pieces gives `α^p·(α - 1) = 1`, i.e. the root of `x^(p+1) - x^p - 1` in
//! `(1, 2]`. `p = 0` halves the segment, `p = 1` is the golden section.

use serde::Serialize;

use crate::error::{Result, SpiralError};
use crate::scalar::{count, lit, powu, Real};

/// Largest `p` accepted by [`p_fibonacci_table`].
pub const P_MAX_CAP: usize = 64;

/// Default solver tolerance on the polynomial residual.
pub const DEFAULT_ROOT_TOL: f64 = 1e-13;

/// Width at which bisection hands over to Newton.
const BISECTION_WIDTH: f64 = 1e-6;
const NEWTON_MAX_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PFibResult<T> {
    pub p: usize,
    pub alpha: T,
    /// `|α^(p+1) - α^p - 1|`.
    pub residual: T,
    /// Bisection plus Newton steps.
    pub iterations: usize,
}

/// `x^p·(x - 1) - 1`.
fn section_poly<T: Real>(p: usize, x: T) -> T {
    powu(x, p) * (x - T::one()) - T::one()
}

/// Derivative `x^(p-1)·((p + 1)·x - p)`.
fn section_poly_deriv<T: Real>(p: usize, x: T) -> T {
    let pf = count::<T>(p);
    powu(x, p.saturating_sub(1)) * ((pf + T::one()) * x - pf)
}

/// Root of `x^(p+1) - x^p - 1` in `(1, 2]`, with residual below `tol`.
///
/// `tol` must lie in `(0, 1e-6)`.
pub fn p_fibonacci<T: Real>(p: usize, tol: T) -> Result<PFibResult<T>> {
    if !(tol > T::zero() && tol < lit(1e-6)) {
        return Err(SpiralError::BadTolerance {
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two: T = lit(2.0);
    if p == 0 {
        return Ok(PFibResult {
            p,
            alpha: two,
            residual: T::zero(),
            iterations: 0,
        });
    }

    // f(1) = -1 < 0 and f(2) = 2^p - 1 > 0 for p >= 1.
    let mut lo: T = T::one() + lit(1e-9);
    let mut hi = two;
    let mut iterations = 0;
    while hi - lo > lit(BISECTION_WIDTH) {
        let mid = (lo + hi) / two;
        if section_poly(p, mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut x = (lo + hi) / two;
    for _ in 0..NEWTON_MAX_STEPS {
        let fx = section_poly(p, x);
        let dfx = section_poly_deriv(p, x);
        let step = fx / dfx;
        let next = x - step;
        iterations += 1;
        // Newton from inside a narrow bracket around a simple root cannot
        // leave it; clamp anyway so the result stays in (1, 2].
        let next = next.max(lo).min(hi);
        if next == x {
            break;
        }
        x = next;
        if step.abs() <= T::epsilon() * x {
            break;
        }
    }

    let residual = section_poly(p, x).abs();
    if residual >= tol {
        return Err(SpiralError::RootNotConverged {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(PFibResult {
        p,
        alpha: x,
        residual,
        iterations,
    })
}

/// Rows `0..=p_max`.
pub fn p_fibonacci_table<T: Real>(p_max: usize) -> Result<Vec<PFibResult<T>>> {
    if p_max > P_MAX_CAP {
        return Err(SpiralError::CapExceeded {
            requested: p_max,
            cap: P_MAX_CAP,
        });
    }
    (0..=p_max)
        .map(|p| p_fibonacci(p, lit::<T>(DEFAULT_ROOT_TOL)))
        .collect()
}
