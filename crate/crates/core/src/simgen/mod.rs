//! Seeded synthetic event streams with known ground truth.
//!
//! Symbols are decimal integer labels and `t` counts from zero. Only `f64`
//! is supported here: the sampler is defined on `f64` uniforms.

mod rng;

use serde::{Deserialize, Serialize};

pub use rng::{XorShift64Star, ZERO_SEED_REPLACEMENT};

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::memory::Observation;
use crate::symbol::SymbolId;

/// Masses over integer labels; labels default to `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDistribution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i64>>,
    pub mass: Vec<f64>,
}

impl LabelDistribution {
    pub fn new(mass: Vec<f64>) -> Self {
        LabelDistribution { labels: None, mass }
    }

    pub fn with_labels(labels: Vec<i64>, mass: Vec<f64>) -> Self {
        LabelDistribution {
            labels: Some(labels),
            mass,
        }
    }

    /// Normalised `1/k^s` over ranks `k = 1..=alphabet`, labels `0..alphabet`.
    pub fn zipf(exponent: f64, alphabet: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidSpec("zipf alphabet must be at least 1".into()));
        }
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidSpec("zipf exponent must be finite and >= 0".into()));
        }
        let w: Vec<f64> = (1..=alphabet).map(|k| (k as f64).powf(-exponent)).collect();
        let total: f64 = w.iter().sum();
        Ok(Self::new(w.into_iter().map(|x| x / total).collect()))
    }

    pub fn labels(&self) -> Vec<i64> {
        match &self.labels {
            Some(l) => l.clone(),
            None => (0..self.mass.len() as i64).collect(),
        }
    }

    /// Validated distribution over the decimal labels, shifted by `offset`.
    pub fn to_distribution(&self, offset: i64) -> Result<DiscreteDistribution<f64>> {
        let labels = self.labels();
        if labels.len() != self.mass.len() {
            return Err(Error::InvalidSpec(format!(
                "{} labels but {} masses",
                labels.len(),
                self.mass.len()
            )));
        }
        let support = labels
            .iter()
            .map(|l| {
                l.checked_add(offset)
                    .map(|x| SymbolId::new(x.to_string()))
                    .ok_or_else(|| Error::InvalidSpec("label overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteDistribution::new(support, self.mass.clone())
            .map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Same labels with the largest and smallest masses exchanged (first
    /// maximum, last minimum).
    pub fn swap_extremes(&self) -> Self {
        let mut out = self.clone();
        if self.mass.is_empty() {
            return out;
        }
        let hi = (0..self.mass.len())
            .fold(0, |b, i| if self.mass[i] > self.mass[b] { i } else { b });
        let lo = (0..self.mass.len())
            .fold(0, |b, i| if self.mass[i] <= self.mass[b] { i } else { b });
        out.mass.swap(hi, lo);
        out
    }
}

/// Ready-to-draw form of a [`LabelDistribution`].
#[derive(Debug, Clone)]
struct Sampler {
    labels: Vec<i64>,
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Sampler {
    fn new(d: &LabelDistribution) -> Result<Self> {
        d.to_distribution(0)?;
        let mut acc = 0.0;
        let cumulative = d
            .mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        let last_positive = d.mass.iter().rposition(|&m| m > 0.0).expect("mass sums to one");
        Ok(Sampler {
            labels: d.labels(),
            cumulative,
            last_positive,
        })
    }

    fn draw(&self, rng: &mut XorShift64Star) -> i64 {
        self.labels[rng.categorical(&self.cumulative, self.last_positive)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    /// I.i.d. draws.
    Stationary { distribution: LabelDistribution },
    /// `before` for `t < change_at`, `after` from then on.
    Changepoint {
        before: LabelDistribution,
        after: LabelDistribution,
        change_at: u64,
    },
    /// One offset `V` drawn at `t = 0`, then i.i.d. `X_n + V`.
    Bifurcation {
        distribution: LabelDistribution,
        offsets: LabelDistribution,
    },
    /// I.i.d. with mass proportional to `1/rank^exponent`.
    Zipf { exponent: f64, alphabet: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(flatten)]
    pub source: Source,
    pub seed: u64,
    pub length: u64,
}

impl SourceSpec {
    pub fn stationary(distribution: LabelDistribution, seed: u64, length: u64) -> Self {
        SourceSpec {
            source: Source::Stationary { distribution },
            seed,
            length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.source {
            Source::Stationary { distribution } => {
                Sampler::new(distribution)?;
            }
            Source::Changepoint {
                before,
                after,
                change_at,
            } => {
                Sampler::new(before)?;
                Sampler::new(after)?;
                if *change_at >= self.length {
                    return Err(Error::InvalidSpec(format!(
                        "change_at {change_at} must be below length {}",
                        self.length
                    )));
                }
            }
            Source::Bifurcation {
                distribution,
                offsets,
            } => {
                Sampler::new(distribution)?;
                Sampler::new(offsets)?;
                for v in offsets.labels() {
                    distribution.to_distribution(v)?;
                }
            }
            Source::Zipf { exponent, alphabet } => {
                LabelDistribution::zipf(*exponent, *alphabet)?;
            }
        }
        Ok(())
    }

    /// Lazily generated stream.
    pub fn iter(&self) -> Result<Generator> {
        self.validate()?;
        let mut rng = XorShift64Star::new(self.seed);
        let (first, second, change_at, offset) = match &self.source {
            Source::Stationary { distribution } => (Sampler::new(distribution)?, None, None, 0),
            Source::Changepoint {
                before,
                after,
                change_at,
            } => (
                Sampler::new(before)?,
                Some(Sampler::new(after)?),
                Some(*change_at),
                0,
            ),
            Source::Bifurcation {
                distribution,
                offsets,
            } => {
                let v = Sampler::new(offsets)?.draw(&mut rng);
                (Sampler::new(distribution)?, None, None, v)
            }
            Source::Zipf { exponent, alphabet } => (
                Sampler::new(&LabelDistribution::zipf(*exponent, *alphabet)?)?,
                None,
                None,
                0,
            ),
        };
        Ok(Generator {
            rng,
            first,
            second,
            change_at,
            offset,
            t: 0,
            length: self.length,
        })
    }

    /// Distribution in force at the end of the stream: the post-change one for
    /// a changepoint, and the realised offset block for a bifurcation.
    pub fn final_distribution(&self) -> Result<DiscreteDistribution<f64>> {
        match &self.source {
            Source::Stationary { distribution } => distribution.to_distribution(0),
            Source::Changepoint { after, .. } => {
                self.validate()?;
                after.to_distribution(0)
            }
            Source::Bifurcation { distribution, .. } => {
                let g = self.iter()?;
                distribution.to_distribution(g.offset)
            }
            Source::Zipf { exponent, alphabet } => {
                LabelDistribution::zipf(*exponent, *alphabet)?.to_distribution(0)
            }
        }
    }
}

/// Iterator over a spec's observations.
#[derive(Debug, Clone)]
pub struct Generator {
    rng: XorShift64Star,
    first: Sampler,
    second: Option<Sampler>,
    change_at: Option<u64>,
    offset: i64,
    t: u64,
    length: u64,
}

impl Generator {
    /// Offset drawn for a bifurcation source; zero otherwise.
    pub fn offset(&self) -> i64 {
        self.offset
    }
}

impl Iterator for Generator {
    type Item = Observation;

    fn next(&mut self) -> Option<Observation> {
        if self.t >= self.length {
            return None;
        }
        let sampler = match (&self.second, self.change_at) {
            (Some(after), Some(c)) if self.t >= c => after,
            _ => &self.first,
        };
        let label = sampler.draw(&mut self.rng) + self.offset;
        let o = Observation::new(self.t, label.to_string());
        self.t += 1;
        Some(o)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.length - self.t) as usize;
        (n, Some(n))
    }
}

pub fn generate(spec: &SourceSpec) -> Result<Vec<Observation>> {
    Ok(spec.iter()?.collect())
}
