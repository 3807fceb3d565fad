//! Threshold solving: inverts a rate bound over the channel parameter.
//!
//! The bounds are monotone in the physical channel parameter (larger noise
//! degrades the channel), so thresholds are found by bisection on `sigma`
//! (BIAWGN) or `eps` (BSC/BEC). Eb/N0 is derived from the solution.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{
    punctured_rate_upper_bound, rate_upper_bound, two_level_rate_bound, BoundReport, SeriesControl,
};
use crate::channels::{Family, MbiosChannel};
use crate::ensembles::{puncture_fractions, punctured_rate, DegreePair, PuncturingPattern};
use crate::quad::QuadratureConfig;
use crate::{Error, Result};

/// Default tolerance on the channel parameter (about 1e-4 dB for BIAWGN).
pub const DEFAULT_TOL: f64 = 1e-5;

const SIGMA_START: (f64, f64) = (0.3, 3.0);
const SIGMA_LIMITS: (f64, f64) = (0.05, 10.0);
// Bracket widening factor below the capacity-limit sigma (about 1 dB).
const SIGMA_STEP: f64 = 1.12;
const MAX_ITERATIONS: usize = 400;
// Slack for the monotonicity check; covers the certified series width.
const MONOTONE_SLACK: f64 = 1e-8;

/// Which rate bound a threshold refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Full LLR statistics.
    Unquantized,
    /// Hard decisions on the LLR.
    TwoLevel,
    /// Full LLR statistics with a puncturing pattern applied.
    Punctured,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Unquantized => "unquantized",
            BoundKind::TwoLevel => "two_level",
            BoundKind::Punctured => "punctured",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "unquantized" => Ok(BoundKind::Unquantized),
            "two_level" | "2level" | "two" => Ok(BoundKind::TwoLevel),
            "punctured" => Ok(BoundKind::Punctured),
            other => Err(Error::Parse(format!(
                "unknown bound kind '{other}' (expected unquantized, two_level or punctured)"
            ))),
        }
    }
}

/// A solved threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub family: Family,
    /// `sigma` for BIAWGN, crossover or erasure probability otherwise.
    pub channel_param: f64,
    /// Eb/N0 in dB at `channel_param` (BIAWGN only).
    pub ebno_db: Option<f64>,
    /// Rate used for the Eb normalization: the punctured design rate when a
    /// pattern is applied, the design rate otherwise.
    pub rate_reference: f64,
    /// Rate the bound was equated to (the mother-code design rate).
    pub target_rate: f64,
    pub bound_kind: BoundKind,
    /// `|bound(channel_param) - target_rate|`.
    pub residual: f64,
    pub iterations: usize,
}

/// `10 log10(1 / (2 R sigma²))` for unit-energy antipodal signalling.
pub fn ebno_db(rate: f64, sigma: f64) -> Result<f64> {
    check_open_unit("rate", rate)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10())
}

/// Inverse of [`ebno_db`] in `sigma`.
pub fn sigma_from_ebno(ebno_db: f64, rate: f64) -> Result<f64> {
    check_open_unit("rate", rate)?;
    if !ebno_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Eb/N0 must be finite, got {ebno_db}"
        )));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))).sqrt())
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must lie in (0, 1), got {x}"
        )))
    }
}

/// `(ml - capacity) / (it - capacity)`: the share of the iterative decoder's
/// gap to capacity that remains even under ML decoding.
pub fn fractional_gap(capacity_db: f64, ml_bound_db: f64, it_threshold_db: f64) -> Result<f64> {
    let denom = it_threshold_db - capacity_db;
    if !(denom > 0.0) || !ml_bound_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "iterative threshold {it_threshold_db} dB must exceed the capacity limit {capacity_db} dB"
        )));
    }
    Ok((ml_bound_db - capacity_db) / denom)
}

/// Eb/N0 (dB) at which the BIAWGN capacity equals `rate`.
pub fn shannon_limit_ebno(rate: f64, tol: f64, q: &QuadratureConfig) -> Result<f64> {
    check_open_unit("rate", rate)?;
    ebno_db(rate, capacity_sigma(rate, tol, q)?)
}

/// `sigma` at which the BIAWGN capacity equals `rate`.
fn capacity_sigma(rate: f64, tol: f64, q: &QuadratureConfig) -> Result<f64> {
    let excess =
        |sigma: f64| -> Result<f64> { Ok(MbiosChannel::biawgn(sigma)?.capacity(q)? - rate) };
    Ok(solve_decreasing(excess, SIGMA_START, SIGMA_LIMITS, 2.0, tol)?.param)
}

/// Channel parameter at which the selected rate bound equals the design rate
/// of `pair`.
///
/// `Punctured` requires a pattern; the other kinds refuse a nontrivial one.
pub fn threshold(
    family: Family,
    pair: &DegreePair,
    pattern: Option<&PuncturingPattern>,
    kind: BoundKind,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<ThresholdReport> {
    ctrl.validate()?;
    q.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    let target = pair.design_rate()?;
    check_open_unit("design rate", target)?;
    let pattern = match (kind, pattern) {
        (BoundKind::Punctured, Some(p)) => Some(p),
        (BoundKind::Punctured, None) => {
            return Err(Error::InvalidArgument(
                "the punctured bound needs a puncturing pattern".into(),
            ))
        }
        (_, Some(p)) if !p.is_trivial() => {
            return Err(Error::InvalidArgument(format!(
                "a puncturing pattern is only used by the punctured bound, not {kind}"
            )))
        }
        _ => None,
    };
    let rate_reference = match pattern {
        Some(p) => punctured_rate(target, puncture_fractions(pair, p)?.node)?,
        None => target,
    };
    let gamma = pair.check_node_distribution();
    let bound = |param: f64| -> Result<BoundReport> {
        let ch = MbiosChannel::new(family, param)?;
        match (kind, pattern) {
            (BoundKind::Unquantized, _) => rate_upper_bound(&ch, &gamma, ctrl, q),
            (BoundKind::TwoLevel, _) => two_level_rate_bound(&ch, &gamma, ctrl, q),
            (BoundKind::Punctured, Some(p)) => punctured_rate_upper_bound(&ch, pair, p, ctrl, q),
            (BoundKind::Punctured, None) => unreachable!("checked above"),
        }
    };
    let excess = |param: f64| Ok(bound(param)?.value - target);

    let sol = match family {
        Family::Biawgn => {
            // Every bound stays below the capacity of the transmitted bits,
            // so the threshold lies below the capacity-limit sigma.
            let hi = capacity_sigma(rate_reference, 1e-12, q)?;
            solve_decreasing(excess, (hi / SIGMA_STEP, hi), SIGMA_LIMITS, SIGMA_STEP, tol)?
        }
        Family::Bsc | Family::Bec => {
            let (lo, hi) = family.parameter_range();
            solve_decreasing(excess, (lo, hi), (lo, hi), 2.0, tol)?
        }
    };
    let ebno = match family {
        Family::Biawgn => Some(ebno_db(rate_reference, sol.param)?),
        _ => None,
    };
    Ok(ThresholdReport {
        family,
        channel_param: sol.param,
        ebno_db: ebno,
        rate_reference,
        target_rate: target,
        bound_kind: kind,
        residual: sol.residual,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, Copy)]
struct Solution {
    param: f64,
    residual: f64,
    iterations: usize,
}

/// Root of a function expected to decrease in its argument.
///
/// Starts from `start`, widens by the factor `step` towards `limits` until
/// the endpoint signs are `(+, -)`, then bisects until the bracket is narrower than `tol` and the
/// residual at the midpoint is at most `tol`. Every midpoint value must lie
/// between the current endpoint values; anything else is reported as a
/// monotonicity error.
fn solve_decreasing<F>(
    mut f: F,
    start: (f64, f64),
    limits: (f64, f64),
    step: f64,
    tol: f64,
) -> Result<Solution>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = start;
    let mut f_lo = f(lo)?;
    while f_lo <= 0.0 && lo > limits.0 {
        lo = (lo / step).max(limits.0);
        f_lo = f(lo)?;
    }
    let mut f_hi = f(hi)?;
    while f_hi >= 0.0 && hi < limits.1 {
        hi = (hi * step).min(limits.1);
        f_hi = f(hi)?;
    }
    if f_lo == 0.0 {
        return Ok(Solution {
            param: lo,
            residual: 0.0,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Solution {
            param: hi,
            residual: 0.0,
            iterations: 0,
        });
    }
    if f_lo < 0.0 && f_hi > 0.0 {
        return Err(Error::Monotonicity(format!(
            "bound increases with the channel parameter on [{lo}, {hi}] ({f_lo:e} -> {f_hi:e})"
        )));
    }
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::NoThreshold(format!(
            "bound minus target rate keeps sign {} on [{lo}, {hi}]",
            if f_lo > 0.0 { "+" } else { "-" }
        )));
    }

    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        iterations += 1;
        if f_mid > f_lo + MONOTONE_SLACK || f_mid < f_hi - MONOTONE_SLACK {
            return Err(Error::Monotonicity(format!(
                "value {f_mid:e} at {mid} lies outside [{f_hi:e}, {f_lo:e}] of bracket [{lo}, {hi}]"
            )));
        }
        if f_mid == 0.0 || (hi - lo <= tol && f_mid.abs() <= tol) || mid <= lo || mid >= hi {
            return Ok(Solution {
                param: mid,
                residual: f_mid.abs(),
                iterations,
            });
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NoThreshold(format!(
                "bisection did not converge within {MAX_ITERATIONS} steps"
            )));
        }
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
}
