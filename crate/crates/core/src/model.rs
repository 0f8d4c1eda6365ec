//! Label sources and the moment constants derived from them.
//!
//! A [`SourcePair`] holds the label distributions of the two sources in
//! exact rational form, padded to a common support. Every probability is
//! also kept as an integer multiple of a common denominator `D` (the
//! pair's *scale*), which lets the simulator accumulate the partial sums
//! `Γ_R`, `Γ_S` exactly in integer units and break greedy ties exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::rng::uniform_below;

/// Probability vector over label indices `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    probs: Vec<Rational>,
    floats: Vec<f64>,
    /// `cumulative[i] = scale * (p_0 + ... + p_i)`.
    cumulative: Vec<u64>,
    scale: u64,
}

impl LabelDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "negative weight {}",
                format_rational(p)
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                format_rational(&total)
            )));
        }
        let scale = common_denominator(probs.iter())?;
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0u64;
        for p in &probs {
            acc += units(p, scale)?;
            cumulative.push(acc);
        }
        debug_assert_eq!(acc, scale);
        let floats = probs.iter().map(to_f64).collect();
        Ok(Self {
            probs,
            floats,
            cumulative,
            scale,
        })
    }

    pub fn parse<S: AsRef<str>>(weights: &[S]) -> Result<Self> {
        let probs = weights
            .iter()
            .map(|w| parse_rational(w.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(probs)
    }

    /// Uniform distribution on `k` labels.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        Self::new(vec![Rational::new(BigInt::one(), BigInt::from(k)); k])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn floats(&self) -> &[f64] {
        &self.floats
    }

    fn padded(&self, len: usize) -> Result<Self> {
        let mut probs = self.probs.clone();
        probs.resize(len.max(self.len()), Rational::zero());
        Self::new(probs)
    }

    /// Draws a label index with probability `probs[i]`.
    ///
    /// Exactly one 64-bit draw is consumed per call unless rejection
    /// sampling of the integer range retries, so the output depends only
    /// on the generator state.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let u = uniform_below(rng, self.scale);
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Moment constants of a pair of sources.
///
/// `X_R = s[L_R]` is the match yield of an R record against a fresh S
/// record and `X_S = r[L_S]` the reverse; both have mean `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    #[serde(with = "crate::rational::serde_string")]
    pub mu: Rational,
    #[serde(with = "crate::rational::serde_string")]
    pub sigma_r2: Rational,
    #[serde(with = "crate::rational::serde_string")]
    pub sigma_s2: Rational,
    #[serde(with = "crate::rational::serde_string")]
    pub gamma: Rational,
    /// Asymptotic variance of the greedy selection count,
    /// `(sigma_r2 + sigma_s2) / (8 mu^2)`.
    #[serde(with = "crate::rational::serde_string")]
    pub sigma_rg2: Rational,
}

impl Moments {
    pub fn variance_sum(&self) -> Rational {
        &self.sigma_r2 + &self.sigma_s2
    }

    pub fn to_f64(&self) -> FloatMoments {
        FloatMoments {
            mu: to_f64(&self.mu),
            sigma_r2: to_f64(&self.sigma_r2),
            sigma_s2: to_f64(&self.sigma_s2),
            gamma: to_f64(&self.gamma),
            sigma_rg2: to_f64(&self.sigma_rg2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloatMoments {
    pub mu: f64,
    pub sigma_r2: f64,
    pub sigma_s2: f64,
    pub gamma: f64,
    pub sigma_rg2: f64,
}

impl FloatMoments {
    pub fn variance_sum(&self) -> f64 {
        self.sigma_r2 + self.sigma_s2
    }
}

/// Computes the moment constants by their defining sums.
///
/// Distributions of different lengths are treated as zero-padded.
pub fn derive_moments(r: &LabelDistribution, s: &LabelDistribution) -> Result<Moments> {
    let zero = Rational::zero();
    let len = r.len().max(s.len());
    let at = |d: &LabelDistribution, i: usize| d.probs.get(i).unwrap_or(&zero).clone();

    let mut mu = Rational::zero();
    let mut second_r = Rational::zero();
    let mut second_s = Rational::zero();
    for i in 0..len {
        let (ri, si) = (at(r, i), at(s, i));
        let rs = &ri * &si;
        second_r += &rs * &si;
        second_s += &rs * &ri;
        mu += rs;
    }
    if mu.is_zero() {
        return Err(Error::ZeroOverlap);
    }
    let mu2 = &mu * &mu;
    let sigma_r2 = second_r - &mu2;
    let sigma_s2 = second_s - &mu2;
    let gamma = r
        .probs
        .iter()
        .chain(s.probs.iter())
        .max()
        .cloned()
        .unwrap_or_else(Rational::zero);
    let sigma_rg2 = (&sigma_r2 + &sigma_s2) / (Rational::from_integer(BigInt::from(8)) * &mu2);
    Ok(Moments {
        mu,
        sigma_r2,
        sigma_s2,
        gamma,
        sigma_rg2,
    })
}

/// Which source supplies a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    R,
    S,
}

impl Source {
    pub fn other(self) -> Self {
        match self {
            Source::R => Source::S,
            Source::S => Source::R,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Source::R => "R",
            Source::S => "S",
        }
    }
}

/// The two label sources, padded to a common support.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePair {
    r: LabelDistribution,
    s: LabelDistribution,
    moments: Moments,
    float_moments: FloatMoments,
    scale: u64,
    r_units: Vec<u64>,
    s_units: Vec<u64>,
}

impl SourcePair {
    pub fn new(r: LabelDistribution, s: LabelDistribution) -> Result<Self> {
        let len = r.len().max(s.len());
        let (r, s) = (r.padded(len)?, s.padded(len)?);
        let moments = derive_moments(&r, &s)?;
        let scale = lcm_u64(r.scale, s.scale)?;
        let r_units = r
            .probs
            .iter()
            .map(|p| units(p, scale))
            .collect::<Result<_>>()?;
        let s_units = s
            .probs
            .iter()
            .map(|p| units(p, scale))
            .collect::<Result<_>>()?;
        let float_moments = moments.to_f64();
        Ok(Self {
            r,
            s,
            moments,
            float_moments,
            scale,
            r_units,
            s_units,
        })
    }

    pub fn parse<S: AsRef<str>>(r: &[S], s: &[S]) -> Result<Self> {
        Self::new(LabelDistribution::parse(r)?, LabelDistribution::parse(s)?)
    }

    /// Fair coin against a two-headed coin: `r = (1/2, 1/2)`, `s = (1, 0)`.
    pub fn illustrative() -> Self {
        Self::parse(&["1/2", "1/2"], &["1", "0"]).expect("valid pair")
    }

    /// Both sources uniform on `k` labels; greedy and alternating coincide.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(LabelDistribution::uniform(k)?, LabelDistribution::uniform(k)?)
    }

    pub fn from_definition(def: &PairDefinition) -> Result<Self> {
        Self::parse(&def.r, &def.s)
    }

    pub fn definition(&self) -> PairDefinition {
        PairDefinition {
            r: self.r.probs.iter().map(format_rational).collect(),
            s: self.s.probs.iter().map(format_rational).collect(),
        }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.s.clone(), self.r.clone()).expect("swap preserves validity")
    }

    pub fn r(&self) -> &LabelDistribution {
        &self.r
    }

    pub fn s(&self) -> &LabelDistribution {
        &self.s
    }

    pub fn dist(&self, source: Source) -> &LabelDistribution {
        match source {
            Source::R => &self.r,
            Source::S => &self.s,
        }
    }

    pub fn support(&self) -> usize {
        self.r.len()
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn float_moments(&self) -> &FloatMoments {
        &self.float_moments
    }

    /// Common denominator `D` of all probabilities in the pair.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// `D * r_i`.
    pub fn r_units(&self) -> &[u64] {
        &self.r_units
    }

    /// `D * s_i`.
    pub fn s_units(&self) -> &[u64] {
        &self.s_units
    }

    /// Units added to the reading source's Γ when it reads `label`:
    /// an R read adds `s[label]`, an S read adds `r[label]`.
    pub fn yield_units(&self, source: Source, label: usize) -> u64 {
        match source {
            Source::R => self.s_units[label],
            Source::S => self.r_units[label],
        }
    }

    /// True when both sources are uniform on the same support.
    pub fn is_degenerate(&self) -> bool {
        self.moments.variance_sum().is_zero()
    }
}

/// On-disk pair definition: `{"r": ["1/2", "1/2"], "s": ["1", "0"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDefinition {
    pub r: Vec<String>,
    pub s: Vec<String>,
}

fn common_denominator<'a>(probs: impl Iterator<Item = &'a Rational>) -> Result<u64> {
    let mut d = BigInt::one();
    for p in probs {
        d = d.lcm(p.denom());
    }
    d.to_u64().ok_or(Error::DenominatorTooLarge)
}

fn lcm_u64(a: u64, b: u64) -> Result<u64> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(Error::DenominatorTooLarge)
}

fn units(p: &Rational, scale: u64) -> Result<u64> {
    let scaled = p * Rational::from_integer(BigInt::from(scale));
    debug_assert!(scaled.is_integer());
    scaled.to_integer().to_u64().ok_or(Error::DenominatorTooLarge)
}
