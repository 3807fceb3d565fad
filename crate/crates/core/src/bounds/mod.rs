//! Bounds on ML decoding of LDPC ensembles.
//!
//! All bounds derive from one lower bound on the normalized conditional
//! entropy of the codeword given the channel output,
//!
//! ```text
//! H(X|Y)/n ≥ 1 - C - (1 - R) (1 - S / (2 ln 2)),   S = Σ_{p≥1} Γ(g_p) / (p(2p-1)),
//! ```
//!
//! combined with Fano's inequality `H(X|Y)/n ≤ R h2(P_b)`. Requiring the
//! bit error probability to vanish gives the rate bound
//! `R ≤ 1 - (1 - C) / (1 - S / (2 ln 2))`.

mod entropy;
mod series;

pub use entropy::{h2, h2_inverse};
pub use series::{
    series_enclosure, series_sum, series_weight, series_weight_tail, SeriesControl, SeriesSum,
    SERIES_WEIGHT_TOTAL,
};

use crate::channels::{MbiosChannel, MomentSequence};
use crate::ensembles::{puncture_fractions, CheckProfile, DegreePair, PuncturingPattern};
use crate::quad::QuadratureConfig;
use crate::roots::bisect;
use crate::{Error, Result};

/// Largest average check degree searched by [`avg_degree_lower_bound`].
pub const MAX_AVERAGE_DEGREE: f64 = 1e4;

/// A bound value together with the diagnostics of the series behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    /// Moment evaluations spent on the series.
    pub series_terms_used: u64,
    /// Half-width of the certified enclosure of the series `S`.
    pub tail_bound: f64,
    /// Capacity of the (effective) channel the bound was computed for.
    pub capacity_used: f64,
    /// Set when an entropy bound came out negative and therefore says nothing.
    pub vacuous: bool,
}

/// Check-regular profile `Γ(x) = x^a` with a real exponent `a > 0`,
/// evaluated as `exp(a ln x)` and set to zero at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalRegular(pub f64);

impl CheckProfile for FractionalRegular {
    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (self.0 * x.ln()).exp()
        }
    }
}

/// `1 - C` and the moment sequence of the channel, computed once and reused
/// by every bound.
#[derive(Debug, Clone)]
struct Statistics {
    capacity_loss: f64,
    moments: MomentSequence,
}

impl Statistics {
    fn of(ch: &MbiosChannel, q: &QuadratureConfig) -> Result<Self> {
        Ok(Self {
            capacity_loss: ch.capacity_loss(q)?,
            moments: ch.moments(q)?,
        })
    }

    fn capacity(&self) -> f64 {
        1.0 - self.capacity_loss
    }

    fn rate_bound<P: CheckProfile + ?Sized>(
        &self,
        profile: &P,
        ctrl: &SeriesControl,
    ) -> Result<BoundReport> {
        let s = series_sum(&self.moments, profile, ctrl)?;
        Ok(BoundReport {
            value: rate_bound_value(self.capacity_loss, s.value),
            series_terms_used: s.terms,
            tail_bound: s.tail,
            capacity_used: self.capacity(),
            vacuous: false,
        })
    }
}

/// `1 - (1 - C) / (1 - S/(2 ln 2))`; equals `C` when the denominator vanishes.
fn rate_bound_value(capacity_loss: f64, s: f64) -> f64 {
    let denom = 1.0 - s / SERIES_WEIGHT_TOTAL;
    if capacity_loss == 0.0 || denom <= 0.0 {
        return 1.0 - capacity_loss;
    }
    1.0 - capacity_loss / denom
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "rate must lie in (0, 1), got {rate}"
        )))
    }
}

/// Lower bound on `H(X|Y)/n` for a code of rate `rate` whose full-rank
/// parity-check matrix has right degree profile `gamma`.
///
/// Negative values are returned as computed, with `vacuous` set.
pub fn entropy_lower_bound<P: CheckProfile + ?Sized>(
    ch: &MbiosChannel,
    rate: f64,
    gamma: &P,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    check_rate(rate)?;
    let stats = Statistics::of(ch, q)?;
    let s = series_sum(&stats.moments, gamma, ctrl)?;
    let value = stats.capacity_loss - (1.0 - rate) * (1.0 - s.value / SERIES_WEIGHT_TOTAL);
    Ok(BoundReport {
        value,
        series_terms_used: s.terms,
        tail_bound: s.tail,
        capacity_used: stats.capacity(),
        vacuous: value < 0.0,
    })
}

/// Upper bound on the rates at which codes with right profile `gamma` can
/// have vanishing bit error probability under ML decoding.
pub fn rate_upper_bound<P: CheckProfile + ?Sized>(
    ch: &MbiosChannel,
    gamma: &P,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    Statistics::of(ch, q)?.rate_bound(gamma, ctrl)
}

/// Lower bound on the bit error probability of a rate-`rate` code.
///
/// The entropy bound divided by the rate lower-bounds `h2(P_b)`; the result
/// is its inverse on `[0, 1/2]`, or zero when the bound is vacuous.
pub fn ber_lower_bound<P: CheckProfile + ?Sized>(
    ch: &MbiosChannel,
    rate: f64,
    gamma: &P,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<f64> {
    let h = entropy_lower_bound(ch, rate, gamma, ctrl, q)?;
    let rhs = h.value / rate;
    if rhs <= 0.0 {
        return Ok(0.0);
    }
    h2_inverse(rhs.min(1.0))
}

/// The rate bound computed with hard decisions on the LLR: the moments are
/// those of a BSC whose crossover is the hard-decision error probability of
/// `ch`, while the capacity term keeps the capacity of `ch` itself.
pub fn two_level_rate_bound<P: CheckProfile + ?Sized>(
    ch: &MbiosChannel,
    gamma: &P,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let hard = MbiosChannel::bsc(ch.hard_decision_crossover())?;
    let stats = Statistics {
        capacity_loss: ch.capacity_loss(q)?,
        moments: hard.moments(q)?,
    };
    stats.rate_bound(gamma, ctrl)
}

/// Rate bound for the mother ensemble `pair` when its code bits are
/// punctured according to `pattern` before transmission over `ch`.
///
/// Punctured bits see an erasure, so the check products pick up a factor
/// `1 - q_e` per edge (`q_e` = edge fraction of punctured bits) and the
/// capacity per code bit becomes `(1 - p̄) C` (`p̄` = node fraction). The
/// result bounds the mother-code design rate.
pub fn punctured_rate_upper_bound(
    ch: &MbiosChannel,
    pair: &DegreePair,
    pattern: &PuncturingPattern,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let fractions = puncture_fractions(pair, pattern)?;
    let loss = ch.capacity_loss(q)?;
    let stats = Statistics {
        capacity_loss: fractions.node + (1.0 - fractions.node) * loss,
        moments: ch.moments(q)?.scaled(1.0 - fractions.edge),
    };
    stats.rate_bound(&pair.check_node_distribution(), ctrl)
}

/// Smallest average check degree `a ≥ 2` compatible with reliable
/// communication at rate `(1 - eps_gap) C`.
///
/// Uses the check-regular profile `x^a`; since `Γ(g) ≥ g^a` for every
/// profile with mean `a`, the result bounds the average check degree of any
/// code reaching that rate from below.
pub fn avg_degree_lower_bound(
    ch: &MbiosChannel,
    eps_gap: f64,
    ctrl: &SeriesControl,
    q: &QuadratureConfig,
) -> Result<f64> {
    if !(eps_gap > 0.0 && eps_gap < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gap to capacity must lie in (0, 1), got {eps_gap}"
        )));
    }
    let stats = Statistics::of(ch, q)?;
    let target = (1.0 - eps_gap) * stats.capacity();
    check_rate(target)?;
    let excess = |a: f64| -> Result<f64> {
        Ok(stats.rate_bound(&FractionalRegular(a), ctrl)?.value - target)
    };
    if excess(2.0)? >= 0.0 {
        return Ok(2.0);
    }
    let mut hi = 4.0;
    while excess(hi)? < 0.0 {
        if hi >= MAX_AVERAGE_DEGREE {
            return Err(Error::UnboundedRequirement {
                limit: MAX_AVERAGE_DEGREE,
            });
        }
        hi = (2.0 * hi).min(MAX_AVERAGE_DEGREE);
    }
    let b = bisect(excess, 2.0, hi, 1e-10, 200)?;
    // The upper end satisfies the rate requirement.
    Ok(b.hi)
}
