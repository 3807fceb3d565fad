//! MBIOS channel models.
//!
//! Every channel is described by the law of its log-likelihood ratio (LLR)
//! given that `+1` was sent. The bounds only need three statistics of that
//! law: the capacity, the tanh moments
//!
//! ```text
//! g_p = ∫₀^∞ a(l) (1 + e^{-l}) tanh^{2p}(l/2) dl = E[tanh^{2p}(L/2)],
//! ```
//!
//! and the crossover probability of a hard decision on the LLR.
//!
//! Punctured code bits are modelled by an erasure cascade: a BEC(π) in front
//! of one of the three base channels.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bounds::h2;
use crate::quad::{integrate, CompositeRule, QuadratureConfig};
use crate::{Error, Result};

/// Width of the integration window around the mean LLR, in standard deviations.
const LLR_WINDOW: f64 = 12.0;

/// The three base channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bsc,
    Bec,
    Biawgn,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Bsc => "bsc",
            Family::Bec => "bec",
            Family::Biawgn => "biawgn",
        }
    }

    /// Range of admissible channel parameters.
    pub fn parameter_range(self) -> (f64, f64) {
        match self {
            Family::Bsc => (0.0, 0.5),
            Family::Bec => (0.0, 1.0),
            Family::Biawgn => (0.0, f64::INFINITY),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsc" => Ok(Family::Bsc),
            "bec" => Ok(Family::Bec),
            "biawgn" | "awgn" => Ok(Family::Biawgn),
            other => Err(Error::Parse(format!(
                "unknown channel family '{other}' (expected bsc, bec or biawgn)"
            ))),
        }
    }
}

/// A memoryless binary-input output-symmetric channel, optionally preceded by
/// an erasure channel.
///
/// The parameter is the crossover probability (BSC), the erasure probability
/// (BEC), or the noise standard deviation for unit-energy antipodal signalling
/// (BIAWGN). Cascades never nest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbiosChannel {
    family: Family,
    param: f64,
    puncture: Option<f64>,
}

fn check_probability(name: &str, value: f64, max: f64) -> Result<()> {
    if (0.0..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must lie in [0, {max}], got {value}"
        )))
    }
}

impl MbiosChannel {
    pub fn bsc(crossover: f64) -> Result<Self> {
        check_probability("BSC crossover probability", crossover, 0.5)?;
        Ok(Self {
            family: Family::Bsc,
            param: crossover,
            puncture: None,
        })
    }

    pub fn bec(erasure: f64) -> Result<Self> {
        check_probability("BEC erasure probability", erasure, 1.0)?;
        Ok(Self {
            family: Family::Bec,
            param: erasure,
            puncture: None,
        })
    }

    pub fn biawgn(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "BIAWGN noise standard deviation must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            family: Family::Biawgn,
            param: sigma,
            puncture: None,
        })
    }

    pub fn new(family: Family, param: f64) -> Result<Self> {
        match family {
            Family::Bsc => Self::bsc(param),
            Family::Bec => Self::bec(param),
            Family::Biawgn => Self::biawgn(param),
        }
    }

    /// Puts a BEC(`pi`) in front of this channel.
    pub fn cascade(&self, pi: f64) -> Result<Self> {
        if self.puncture.is_some() {
            return Err(Error::InvalidArgument(
                "erasure cascades cannot be nested".into(),
            ));
        }
        check_probability("cascade erasure probability", pi, 1.0)?;
        Ok(Self {
            puncture: Some(pi),
            ..*self
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Erasure probability of the cascade stage, if any.
    pub fn puncture(&self) -> Option<f64> {
        self.puncture
    }

    /// The channel without its cascade stage.
    pub fn base(&self) -> Self {
        Self {
            puncture: None,
            ..*self
        }
    }

    fn keep(&self) -> f64 {
        1.0 - self.puncture.unwrap_or(0.0)
    }

    /// Capacity in bits per channel use.
    pub fn capacity(&self, q: &QuadratureConfig) -> Result<f64> {
        Ok(1.0 - self.capacity_loss(q)?)
    }

    /// `1 - C`, computed without cancellation for nearly noiseless channels.
    pub fn capacity_loss(&self, q: &QuadratureConfig) -> Result<f64> {
        let base = match self.family {
            Family::Bsc => h2(self.param)?,
            Family::Bec => self.param,
            Family::Biawgn => {
                let law = LlrGaussian::new(self.param);
                let (a, b) = law.window();
                integrate(
                    |l| law.pdf(l) * softplus(-l) / std::f64::consts::LN_2,
                    a,
                    b,
                    q,
                )?
                .value
            }
        };
        let pi = self.puncture.unwrap_or(0.0);
        Ok(pi + (1.0 - pi) * base)
    }

    /// The tanh moment `g_p` for a single `p ≥ 1`.
    pub fn g_moment(&self, p: u32, q: &QuadratureConfig) -> Result<f64> {
        if p == 0 {
            return Err(Error::InvalidArgument("moment order p must be >= 1".into()));
        }
        let base = match self.family {
            Family::Bsc => (1.0 - 2.0 * self.param).powi(2 * p as i32),
            Family::Bec => 1.0 - self.param,
            Family::Biawgn => {
                let law = LlrGaussian::new(self.param);
                let (a, b) = law.window();
                let order = 2.0 * p as f64;
                integrate(
                    |l| law.pdf(l) * (order * ln_tanh_half(l.abs())).exp(),
                    a,
                    b,
                    q,
                )?
                .value
            }
        };
        Ok(self.keep() * base)
    }

    /// Probability that a hard decision on the LLR is wrong given `+1` was
    /// sent, with a zero LLR counted as half an error.
    pub fn hard_decision_crossover(&self) -> f64 {
        let base = match self.family {
            Family::Bsc => self.param,
            Family::Bec => 0.5 * self.param,
            Family::Biawgn => q_function(1.0 / self.param),
        };
        let pi = self.puncture.unwrap_or(0.0);
        (1.0 - pi) * base + 0.5 * pi
    }

    /// The whole sequence `g_1, g_2, ...` in a form cheap to evaluate at any order.
    pub fn moments(&self, q: &QuadratureConfig) -> Result<MomentSequence> {
        q.validate()?;
        let seq = match self.family {
            Family::Bsc => MomentSequence::geometric((1.0 - 2.0 * self.param).powi(2)),
            Family::Bec => MomentSequence::constant(1.0 - self.param),
            Family::Biawgn => MomentSequence {
                scale: 1.0,
                source: Source::Table(Arc::new(LlrTable::build(self.param, q)?)),
            },
        };
        Ok(seq.scaled(self.keep()))
    }
}

impl fmt::Display for MbiosChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.param)?;
        if let Some(pi) = self.puncture {
            write!(f, "!punct={pi}")?;
        }
        Ok(())
    }
}

/// Parses `bsc:<eps>`, `bec:<eps>` or `biawgn:<sigma>`, optionally followed by
/// `!punct=<pi>`.
impl FromStr for MbiosChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (main, punct) = match s.split_once('!') {
            Some((m, rest)) => {
                let value = rest.trim().strip_prefix("punct=").ok_or_else(|| {
                    Error::Parse(format!("channel '{s}': expected '!punct=<pi>' suffix"))
                })?;
                (m, Some(parse_number(value, s)?))
            }
            None => (s, None),
        };
        let (family, param) = main.split_once(':').ok_or_else(|| {
            Error::Parse(format!("channel '{s}': expected '<family>:<parameter>'"))
        })?;
        let ch = MbiosChannel::new(family.parse()?, parse_number(param, s)?)?;
        match punct {
            Some(pi) => ch.cascade(pi),
            None => Ok(ch),
        }
    }
}

fn parse_number(text: &str, whole: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("channel '{whole}': '{text}' is not a number")))
}

/// Gaussian tail function `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln tanh(a/2)` for `a ≥ 0`; `-∞` at zero.
fn ln_tanh_half(a: f64) -> f64 {
    let e = (-a).exp();
    (-e).ln_1p() - e.ln_1p()
}

/// LLR law of the BIAWGN channel: `L ~ N(2/σ², 4/σ²)` given `+1` was sent.
#[derive(Debug, Clone, Copy)]
struct LlrGaussian {
    mean: f64,
    sd: f64,
}

impl LlrGaussian {
    fn new(sigma: f64) -> Self {
        Self {
            mean: 2.0 / (sigma * sigma),
            sd: 2.0 / sigma,
        }
    }

    fn window(&self) -> (f64, f64) {
        (
            self.mean - LLR_WINDOW * self.sd,
            self.mean + LLR_WINDOW * self.sd,
        )
    }

    fn pdf(&self, l: f64) -> f64 {
        let z = (l - self.mean) / self.sd;
        (-0.5 * z * z).exp() / (self.sd * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Quadrature of the LLR law, tabulated as `(ln tanh²(|l|/2), weight)` pairs
/// so that `g_p = Σ w·exp(p·ln t²)` costs one pass per order.
#[derive(Debug, Clone)]
struct LlrTable {
    log_t2: Vec<f64>,
    weights: Vec<f64>,
}

impl LlrTable {
    fn from_rule(law: &LlrGaussian, rule: &CompositeRule) -> Self {
        let mut pairs: Vec<(f64, f64)> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&l, &w)| (2.0 * ln_tanh_half(l.abs()), w * law.pdf(l)))
            .filter(|&(_, w)| w > 0.0)
            .collect();
        // Largest tanh² first, so evaluation can stop once terms underflow.
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (log_t2, weights) = pairs.into_iter().unzip();
        Self { log_t2, weights }
    }

    /// Doubles the panel count until every probe moment agrees between two
    /// successive grids to within `abs_tol`.
    fn build(sigma: f64, q: &QuadratureConfig) -> Result<Self> {
        let law = LlrGaussian::new(sigma);
        let (a, b) = law.window();
        let probes: Vec<f64> = (0..32).map(|k| 4f64.powi(k)).collect();
        let mut panels = 32usize;
        let mut coarse = LlrTable::from_rule(&law, &CompositeRule::uniform(a, b, panels));
        let mut gap = f64::INFINITY;
        while 2 * panels <= q.max_refinements {
            panels *= 2;
            let fine = LlrTable::from_rule(&law, &CompositeRule::uniform(a, b, panels));
            gap = probes
                .iter()
                .map(|&p| (fine.moment(p) - coarse.moment(p)).abs())
                .fold(0.0, f64::max);
            if gap <= q.abs_tol {
                return Ok(fine);
            }
            coarse = fine;
        }
        Err(Error::Accuracy {
            requested: q.abs_tol,
            achieved: gap,
        })
    }

    fn moment(&self, p: f64) -> f64 {
        let mut sum = 0.0;
        for (&lt, &w) in self.log_t2.iter().zip(&self.weights) {
            let x = p * lt;
            if x < -745.0 {
                break;
            }
            sum += w * x.exp();
        }
        sum
    }
}

#[derive(Clone)]
enum Source {
    Constant(f64),
    Geometric(f64),
    Table(Arc<LlrTable>),
    Custom {
        f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
        floor: f64,
    },
}

/// The moment sequence `p ↦ g_p` of a channel, possibly scaled by a constant
/// factor (erasure cascades and edge-averaged puncturing both scale it).
///
/// Besides `get`, the sequence knows a lower bound `floor` valid for every
/// order; the series code uses it to bracket the truncated tail.
#[derive(Clone)]
pub struct MomentSequence {
    scale: f64,
    source: Source,
}

impl MomentSequence {
    /// `g_p = g` for every `p` (erasure channels).
    pub fn constant(g: f64) -> Self {
        Self {
            scale: 1.0,
            source: Source::Constant(g),
        }
    }

    /// `g_p = ratio^p` (binary symmetric channels, `ratio = (1 - 2ε)²`).
    pub fn geometric(ratio: f64) -> Self {
        Self {
            scale: 1.0,
            source: Source::Geometric(ratio),
        }
    }

    /// An arbitrary nonincreasing sequence with a known lower bound.
    pub fn from_fn<F>(f: F, floor: f64) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        Self {
            scale: 1.0,
            source: Source::Custom {
                f: Arc::new(f),
                floor,
            },
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale *= factor;
        self
    }

    /// `g_p` for `p ≥ 1`.
    pub fn get(&self, p: u64) -> f64 {
        let raw = match &self.source {
            Source::Constant(g) => *g,
            Source::Geometric(r) => r.powf(p as f64),
            Source::Table(t) => t.moment(p as f64),
            Source::Custom { f, .. } => f(p),
        };
        self.scale * raw
    }

    /// A value no larger than any `g_p`.
    pub fn floor(&self) -> f64 {
        let raw = match &self.source {
            Source::Constant(g) => *g,
            Source::Geometric(r) if *r >= 1.0 => 1.0,
            Source::Geometric(_) | Source::Table(_) => 0.0,
            Source::Custom { floor, .. } => *floor,
        };
        self.scale * raw
    }
}

impl fmt::Debug for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Constant(g) => format!("Constant({g})"),
            Source::Geometric(r) => format!("Geometric({r})"),
            Source::Table(t) => format!("Table({} nodes)", t.weights.len()),
            Source::Custom { floor, .. } => format!("Custom(floor = {floor})"),
        };
        f.debug_struct("MomentSequence")
            .field("scale", &self.scale)
            .field("source", &kind)
            .finish()
    }
}
