//! Degree distributions of LDPC ensembles and puncturing patterns.
//!
//! Degrees are node degrees throughout: the entry `i → λ_i` is the fraction
//! of edges attached to variable nodes of degree `i`, i.e. the coefficient of
//! `x^{i-1}` in `λ(x)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest node degree accepted anywhere.
pub const MAX_DEGREE: u32 = 10_000;
/// Coefficient sums further than this from one are rejected.
pub const RENORMALIZE_TOL: f64 = 1e-4;

// Sums this close to one are left alone so that stored ensembles reload
// bit for bit.
const EXACT_SUM_TOL: f64 = 1e-12;

/// A right degree profile `Γ` usable by the bound kernels: nondecreasing on
/// `[0, 1]` with `Γ(1) = 1`.
pub trait CheckProfile {
    fn eval(&self, x: f64) -> f64;
}

fn normalized(kind: &str, coeffs: &BTreeMap<u32, f64>) -> Result<BTreeMap<u32, f64>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidEnsemble(format!(
            "{kind} has no coefficients"
        )));
    }
    for (&d, &c) in coeffs {
        if !(2..=MAX_DEGREE).contains(&d) {
            return Err(Error::InvalidEnsemble(format!(
                "{kind}: degree {d} outside [2, {MAX_DEGREE}]"
            )));
        }
        if !(c > 0.0 && c <= 1.0 + RENORMALIZE_TOL) {
            return Err(Error::InvalidEnsemble(format!(
                "{kind}: coefficient of degree {d} must lie in (0, 1], got {c}"
            )));
        }
    }
    let sum: f64 = coeffs.values().sum();
    if (sum - 1.0).abs() > RENORMALIZE_TOL {
        return Err(Error::InvalidEnsemble(format!(
            "{kind}: coefficients sum to {sum}, not 1"
        )));
    }
    if (sum - 1.0).abs() <= EXACT_SUM_TOL {
        return Ok(coeffs.clone());
    }
    Ok(coeffs.iter().map(|(&d, &c)| (d, c / sum)).collect())
}

/// Edge-perspective degree distributions `(λ, ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreePair {
    lambda: BTreeMap<u32, f64>,
    rho: BTreeMap<u32, f64>,
}

impl DegreePair {
    /// Validates both distributions, rescaling them to sum to one when the
    /// printed coefficients are off by rounding only.
    pub fn new(lambda: BTreeMap<u32, f64>, rho: BTreeMap<u32, f64>) -> Result<Self> {
        let pair = Self {
            lambda: normalized("lambda", &lambda)?,
            rho: normalized("rho", &rho)?,
        };
        pair.design_rate()?;
        Ok(pair)
    }

    pub fn from_pairs(lambda: &[(u32, f64)], rho: &[(u32, f64)]) -> Result<Self> {
        Self::new(
            collect_degrees("lambda", lambda)?,
            collect_degrees("rho", rho)?,
        )
    }

    pub fn lambda(&self) -> &BTreeMap<u32, f64> {
        &self.lambda
    }

    pub fn rho(&self) -> &BTreeMap<u32, f64> {
        &self.rho
    }

    /// `∫₀¹ λ(x) dx = Σ λ_i / i`.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda.iter().map(|(&i, &c)| c / i as f64).sum()
    }

    /// `∫₀¹ ρ(x) dx = Σ ρ_j / j`.
    pub fn rho_integral(&self) -> f64 {
        self.rho.iter().map(|(&j, &c)| c / j as f64).sum()
    }

    pub fn design_rate(&self) -> Result<f64> {
        let r = 1.0 - self.rho_integral() / self.lambda_integral();
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::InvalidEnsemble(format!(
                "design rate {r} is not positive"
            )))
        }
    }

    pub fn average_check_degree(&self) -> f64 {
        1.0 / self.rho_integral()
    }

    /// Converts `ρ` to the node perspective: `Γ_k = (ρ_k/k) / Σ_j ρ_j/j`.
    pub fn check_node_distribution(&self) -> CheckNodeDistribution {
        let total = self.rho_integral();
        CheckNodeDistribution {
            gamma: self
                .rho
                .iter()
                .map(|(&k, &c)| (k, c / k as f64 / total))
                .collect(),
        }
    }

    /// Node-perspective variable distribution `Λ_i = (λ_i/i) / Σ_j λ_j/j`.
    pub fn variable_node_fractions(&self) -> BTreeMap<u32, f64> {
        let total = self.lambda_integral();
        self.lambda
            .iter()
            .map(|(&i, &c)| (i, c / i as f64 / total))
            .collect()
    }
}

fn collect_degrees(kind: &str, pairs: &[(u32, f64)]) -> Result<BTreeMap<u32, f64>> {
    let mut map = BTreeMap::new();
    for &(d, c) in pairs {
        if map.insert(d, c).is_some() {
            return Err(Error::InvalidEnsemble(format!(
                "{kind}: degree {d} listed twice"
            )));
        }
    }
    Ok(map)
}

/// Node-perspective check degree distribution `Γ(x) = Σ_k Γ_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckNodeDistribution {
    gamma: BTreeMap<u32, f64>,
}

impl CheckNodeDistribution {
    pub fn new(gamma: BTreeMap<u32, f64>) -> Result<Self> {
        for (&k, &c) in &gamma {
            if k == 0 || k > MAX_DEGREE || !(c > 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "Gamma: invalid entry degree {k}, coefficient {c}"
                )));
            }
        }
        let sum: f64 = gamma.values().sum();
        if gamma.is_empty() || (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "Gamma: coefficients sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            gamma: gamma.into_iter().map(|(k, c)| (k, c / sum)).collect(),
        })
    }

    /// Check-regular profile `Γ(x) = x^k`.
    pub fn regular(k: u32) -> Result<Self> {
        Self::new(BTreeMap::from([(k, 1.0)]))
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, f64> {
        &self.gamma
    }

    /// Average check degree `Σ k Γ_k`.
    pub fn mean(&self) -> f64 {
        self.gamma.iter().map(|(&k, &c)| k as f64 * c).sum()
    }
}

impl CheckProfile for CheckNodeDistribution {
    fn eval(&self, x: f64) -> f64 {
        self.gamma.iter().map(|(&k, &c)| c * x.powi(k as i32)).sum()
    }
}

/// Number of ones in a full-rank parity-check matrix per information bit:
/// `(1 - R) · ā / R` with `ā` the average check degree.
pub fn parity_check_density(rate: f64, pair: &DegreePair) -> Result<f64> {
    density_from_degree(rate, pair.average_check_degree())
}

/// Same as [`parity_check_density`] for a given average check degree.
pub fn density_from_degree(rate: f64, avg_check_degree: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rate must lie in (0, 1), got {rate}"
        )));
    }
    Ok((1.0 - rate) * avg_check_degree / rate)
}

/// Puncturing rates per variable degree, or one rate for every code bit.
#[derive(Debug, Clone, PartialEq)]
pub enum PuncturingPattern {
    PerDegree(BTreeMap<u32, f64>),
    Uniform(f64),
}

impl PuncturingPattern {
    pub fn per_degree(rates: BTreeMap<u32, f64>) -> Result<Self> {
        for (&d, &r) in &rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidPattern(format!(
                    "rate for degree {d} must lie in [0, 1], got {r}"
                )));
            }
        }
        Ok(Self::PerDegree(rates))
    }

    pub fn uniform(rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::InvalidPattern(format!(
                "uniform rate must lie in [0, 1], got {rate}"
            )));
        }
        Ok(Self::Uniform(rate))
    }

    pub fn none() -> Self {
        Self::Uniform(0.0)
    }

    /// Puncturing rate of bits of the given degree (zero when unlisted).
    pub fn rate_for(&self, degree: u32) -> f64 {
        match self {
            Self::PerDegree(m) => m.get(&degree).copied().unwrap_or(0.0),
            Self::Uniform(r) => *r,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Self::PerDegree(m) => m.values().all(|&r| r == 0.0),
            Self::Uniform(r) => *r == 0.0,
        }
    }

    fn check_against(&self, pair: &DegreePair) -> Result<()> {
        if let Self::PerDegree(m) = self {
            if let Some(d) = m.keys().find(|d| !pair.lambda.contains_key(d)) {
                return Err(Error::InvalidPattern(format!(
                    "degree {d} does not occur in lambda"
                )));
            }
        }
        Ok(())
    }
}

/// Expected fraction of punctured bits, weighted by nodes and by edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PunctureFractions {
    /// `Σ Λ_i π_i`: fraction of code bits removed.
    pub node: f64,
    /// `Σ λ_i π_i`: fraction of graph edges attached to removed bits.
    pub edge: f64,
}

pub fn puncture_fractions(
    pair: &DegreePair,
    pattern: &PuncturingPattern,
) -> Result<PunctureFractions> {
    pattern.check_against(pair)?;
    let node = pair
        .variable_node_fractions()
        .iter()
        .map(|(&i, &f)| f * pattern.rate_for(i))
        .sum();
    let edge = pair
        .lambda
        .iter()
        .map(|(&i, &c)| c * pattern.rate_for(i))
        .sum();
    Ok(PunctureFractions { node, edge })
}

/// Rate after removing a fraction `node_fraction` of the code bits.
pub fn punctured_rate(rate: f64, node_fraction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&node_fraction) {
        return Err(Error::InvalidPattern(format!(
            "punctured fraction {node_fraction} leaves no transmitted bits"
        )));
    }
    let r = rate / (1.0 - node_fraction);
    if r >= 1.0 {
        return Err(Error::InvalidPattern(format!(
            "over-punctured: rate {rate} becomes {r}"
        )));
    }
    Ok(r)
}

/// A degree map serialized with stringified degrees in numeric order.
#[derive(Debug, Clone, PartialEq, Default)]
struct DegreeMap(BTreeMap<u32, f64>);

impl Serialize for DegreeMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (d, c) in &self.0 {
            map.serialize_entry(&d.to_string(), c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for DegreeMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<u32>()
                    .map(|deg| (deg, v))
                    .map_err(|_| de::Error::custom(format!("degree key '{k}' is not an integer")))
            })
            .collect::<std::result::Result<BTreeMap<_, _>, _>>()
            .map(DegreeMap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum PatternRecord {
    Uniform(f64),
    PerDegree(DegreeMap),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    lambda: DegreeMap,
    rho: DegreeMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<PatternRecord>,
}

/// The content of an ensemble file: a degree pair, an optional puncturing
/// pattern and an optional display name.
///
/// ```json
/// {"name":"reg36","lambda":{"3":1.0},"rho":{"6":1.0},"pi":{"3":0.1}}
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub name: Option<String>,
    pub pair: DegreePair,
    pub pattern: Option<PuncturingPattern>,
}

impl Ensemble {
    pub fn from_json(text: &str) -> Result<Self> {
        let rec: EnsembleRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let pair = DegreePair::new(rec.lambda.0, rec.rho.0)?;
        let pattern = match rec.pi {
            None => None,
            Some(PatternRecord::Uniform(r)) => Some(PuncturingPattern::uniform(r)?),
            Some(PatternRecord::PerDegree(m)) => Some(PuncturingPattern::per_degree(m.0)?),
        };
        if let Some(p) = &pattern {
            puncture_fractions(&pair, p)?;
        }
        Ok(Self {
            name: rec.name,
            pair,
            pattern,
        })
    }

    pub fn to_json(&self) -> String {
        let rec = EnsembleRecord {
            name: self.name.clone(),
            lambda: DegreeMap(self.pair.lambda.clone()),
            rho: DegreeMap(self.pair.rho.clone()),
            pi: self.pattern.as_ref().map(|p| match p {
                PuncturingPattern::Uniform(r) => PatternRecord::Uniform(*r),
                PuncturingPattern::PerDegree(m) => PatternRecord::PerDegree(DegreeMap(m.clone())),
            }),
        };
        serde_json::to_string(&rec).expect("ensemble records always serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Name for display: the stored name, else `"ensemble"`.
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("ensemble")
    }
}

impl fmt::Display for DegreePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |m: &BTreeMap<u32, f64>| {
            m.iter()
                .map(|(&d, &c)| format!("{c:.5}x^{}", d - 1))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(
            f,
            "lambda = {}; rho = {}",
            poly(&self.lambda),
            poly(&self.rho)
        )
    }
}
