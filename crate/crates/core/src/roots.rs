//! Bracketed bisection.

use crate::{Error, Result};

/// Outcome of a bisection: the final bracket `[lo, hi]` still encloses a sign
/// change of the function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub iterations: usize,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).abs()
    }
}

/// Bisects a fallible function on `[lo, hi]` until the bracket is no wider
/// than `x_tol`.
///
/// The endpoint values must have opposite signs (or one of them be zero).
/// An exact zero at a midpoint collapses the bracket onto that point.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(x_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bisection needs lo < hi and x_tol > 0, got [{lo}, {hi}] and {x_tol}"
        )));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    bisect_from(
        &mut f,
        Bracket {
            lo,
            hi,
            f_lo,
            f_hi,
            iterations: 0,
        },
        x_tol,
        max_iter,
    )
}

/// Continues bisection from an already evaluated bracket.
pub fn bisect_from<F>(f: &mut F, start: Bracket, x_tol: f64, max_iter: usize) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut b = start;
    if b.f_lo.is_nan() || b.f_hi.is_nan() {
        return Err(Error::InvalidArgument(
            "function is NaN at a bracket endpoint".into(),
        ));
    }
    if b.f_lo == 0.0 {
        b.hi = b.lo;
        b.f_hi = 0.0;
        return Ok(b);
    }
    if b.f_hi == 0.0 {
        b.lo = b.hi;
        b.f_lo = 0.0;
        return Ok(b);
    }
    if b.f_lo.signum() == b.f_hi.signum() {
        return Err(Error::NoThreshold(format!(
            "no sign change on [{}, {}] (f = {:e}, {:e})",
            b.lo, b.hi, b.f_lo, b.f_hi
        )));
    }
    while b.width() > x_tol && b.iterations < max_iter {
        let mid = b.midpoint();
        if mid <= b.lo || mid >= b.hi {
            break;
        }
        let f_mid = f(mid)?;
        b.iterations += 1;
        if f_mid == 0.0 {
            b.lo = mid;
            b.hi = mid;
            b.f_lo = 0.0;
            b.f_hi = 0.0;
            break;
        }
        if f_mid.signum() == b.f_lo.signum() {
            b.lo = mid;
            b.f_lo = f_mid;
        } else {
            b.hi = mid;
            b.f_hi = f_mid;
        }
    }
    Ok(b)
}
