//! Certified evaluation of `Σ_{p≥1} Γ(g_p) / (p(2p-1))`.
//!
//! Only two facts about the summands are used: `g_p` is nonincreasing and
//! bounded below by the sequence floor, and `Γ` is nondecreasing on `[0, 1]`.
//! A block of consecutive orders `(n, m]` then contributes between
//! `Γ(g_m)·W` and `Γ(g_n)·W`, where `W` is the exact weight of the block, and
//! everything past the last evaluated order lies between `Γ(floor)·R_n` and
//! `Γ(g_n)·R_n` with `R_n = Σ_{p>n} 1/(p(2p-1))`.
//!
//! Blocks grow geometrically while `Γ(g_p)` is flat and shrink back to single
//! orders where it moves, so slowly decaying sequences (nearly noiseless
//! channels) need only a few dozen moment evaluations.

use crate::channels::MomentSequence;
use crate::ensembles::CheckProfile;
use crate::{Error, Result};

/// `Σ_{p≥1} 1/(p(2p-1)) = 2 ln 2`.
pub const SERIES_WEIGHT_TOTAL: f64 = 2.0 * std::f64::consts::LN_2;

// Largest order the block search may reach; keeps `p as f64` exact.
const MAX_ORDER: u64 = 1 << 52;

/// Truncation controls for the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Bound on the half-width of the returned enclosure.
    pub tail_tol: f64,
    /// Bound on the number of moment evaluations.
    pub max_terms: u64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tail_tol: 1e-10,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesControl {
    pub fn new(tail_tol: f64, max_terms: u64) -> Result<Self> {
        let c = Self {
            tail_tol,
            max_terms,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "series tail_tol must be positive, got {}",
                self.tail_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidArgument(
                "series max_terms must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An enclosure `[lower, upper]` of the series; `value` is its midpoint and
/// `tail` its half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub tail: f64,
    /// Number of moment evaluations performed.
    pub terms: u64,
}

/// `1/(p(2p-1))`.
pub fn series_weight(p: u64) -> f64 {
    let p = p as f64;
    1.0 / (p * (2.0 * p - 1.0))
}

/// `R_n = Σ_{p>n} 1/(p(2p-1))`.
pub fn series_weight_tail(n: u64) -> f64 {
    if n < 64 {
        let head: f64 = (1..=n).map(series_weight).sum();
        return SERIES_WEIGHT_TOTAL - head;
    }
    // From the asymptotic expansion of H_{2n} - H_n.
    let x = 1.0 / n as f64;
    let x2 = x * x;
    x * (0.5 - x * (0.125 - x2 * (1.0 / 64.0 - x2 / 128.0)))
}

/// Weight of the orders `n+1 ..= m`.
fn block_weight(n: u64, m: u64) -> f64 {
    match m - n {
        0 => 0.0,
        1 => series_weight(m),
        _ => series_weight_tail(n) - series_weight_tail(m),
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Computes the enclosure, stopping at `max_terms` evaluations even when it
/// is still wider than requested.
pub fn series_enclosure<P: CheckProfile + ?Sized>(
    moments: &MomentSequence,
    profile: &P,
    ctrl: &SeriesControl,
) -> Result<SeriesSum> {
    ctrl.validate()?;
    let gamma = |p: u64| profile.eval(moments.get(p).clamp(0.0, 1.0));
    let gamma_floor = profile.eval(moments.floor().clamp(0.0, 1.0));
    let budget = 2.0 * ctrl.tail_tol;

    let mut lower = Accumulator::default();
    let mut upper = Accumulator::default();
    let mut n = 1u64;
    let mut gamma_n = gamma(1);
    let mut evals = 1u64;
    lower.add(gamma_n);
    upper.add(gamma_n);

    let mut used = 0.0;
    let mut step = 1u64;
    let mut grow = true;
    loop {
        let tail_width = (gamma_n - gamma_floor).max(0.0) * series_weight_tail(n);
        if used + tail_width <= budget || evals >= ctrl.max_terms || n >= MAX_ORDER {
            break;
        }
        let m = n.saturating_add(step).min(MAX_ORDER);
        let gamma_m = gamma(m);
        evals += 1;
        let inner = block_weight(n, m - 1);
        let width = (gamma_n - gamma_m).max(0.0) * inner;
        let allowance = 0.5 * (budget - used) * block_weight(n, m) / series_weight_tail(n);
        if m - n > 1 && width > allowance {
            step = (step / 2).max(1);
            grow = false;
            continue;
        }
        let last = series_weight(m) * gamma_m;
        lower.add(gamma_m * inner + last);
        upper.add(gamma_n * inner + last);
        used += width;
        n = m;
        gamma_n = gamma_m;
        if grow {
            step = step.saturating_mul(2);
        }
        grow = true;
    }

    let r_n = series_weight_tail(n);
    let lo = lower.total() + gamma_floor * r_n;
    let hi = upper.total() + gamma_n * r_n;
    Ok(SeriesSum {
        value: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        tail: 0.5 * (hi - lo).max(0.0),
        terms: evals,
    })
}

/// Like [`series_enclosure`] but fails with [`Error::Truncation`] when the
/// half-width exceeds `ctrl.tail_tol`.
pub fn series_sum<P: CheckProfile + ?Sized>(
    moments: &MomentSequence,
    profile: &P,
    ctrl: &SeriesControl,
) -> Result<SeriesSum> {
    let s = series_enclosure(moments, profile, ctrl)?;
    if s.tail > ctrl.tail_tol {
        return Err(Error::Truncation {
            requested: ctrl.tail_tol,
            achieved: s.tail,
            terms: s.terms,
        });
    }
    Ok(s)
}
