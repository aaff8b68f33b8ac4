use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of the sustained-unexpectedness alarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig<S> {
    /// Decay of the fast average of clamped unexpectedness.
    pub beta: S,
    /// Alarm level in bits.
    pub theta: S,
    /// Consecutive exceedances needed before the flag goes up.
    pub min_hits: u32,
    /// Decay of the slow reference level subtracted before thresholding.
    /// `None` compares the fast average against `theta` directly.
    pub baseline_decay: Option<S>,
}

impl<S: Scalar> Default for DetectorConfig<S> {
    fn default() -> Self {
        DetectorConfig {
            beta: S::of(0.98),
            theta: S::of(0.35),
            min_hits: 20,
            baseline_decay: Some(S::of(0.999)),
        }
    }
}

impl<S: Scalar> DetectorConfig<S> {
    /// Plain rule: fast average alone against `theta`.
    pub fn absolute(beta: S, theta: S, min_hits: u32) -> Self {
        DetectorConfig {
            beta,
            theta,
            min_hits,
            baseline_decay: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > S::zero() && self.beta < S::one()) {
            return Err(Error::param("beta", format!("{} outside the open interval (0, 1)", self.beta)));
        }
        if !(self.theta >= S::zero()) || !self.theta.is_finite() {
            return Err(Error::param("theta", "must be a finite number of bits >= 0"));
        }
        if self.min_hits == 0 {
            return Err(Error::param("min-hits", "must be at least 1"));
        }
        if let Some(b) = self.baseline_decay {
            if !(b > S::zero() && b < S::one()) {
                return Err(Error::param(
                    "baseline-decay",
                    format!("{b} outside the open interval (0, 1)"),
                ));
            }
        }
        Ok(())
    }
}

/// EWMA-over-threshold alarm on clamped unexpectedness.
///
/// `ewma <- (1 - beta) * u + beta * ewma`; the flag is up once the excess
/// `ewma - reference` has stayed above `theta` for `min_hits` consecutive
/// events. The reference is zero, or a bias-corrected slow average of the
/// same signal taken before the current event when `baseline_decay` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeDetector<S> {
    config: DetectorConfig<S>,
    ewma: S,
    baseline: S,
    /// `1 - baseline_decay^n` after n updates.
    baseline_norm: S,
    hits: u32,
}

impl<S: Scalar> ChangeDetector<S> {
    pub fn new(config: DetectorConfig<S>) -> Result<Self> {
        config.validate()?;
        Ok(ChangeDetector {
            config,
            ewma: S::zero(),
            baseline: S::zero(),
            baseline_norm: S::zero(),
            hits: 0,
        })
    }

    pub fn config(&self) -> &DetectorConfig<S> {
        &self.config
    }

    pub fn ewma(&self) -> S {
        self.ewma
    }

    pub fn consecutive_hits(&self) -> u32 {
        self.hits
    }

    /// Reference level the next event will be compared against.
    pub fn reference(&self) -> Option<S> {
        self.config.baseline_decay?;
        if self.baseline_norm > S::zero() {
            Some(self.baseline / self.baseline_norm)
        } else {
            None
        }
    }

    /// Feeds one clamped unexpectedness value; returns the change flag.
    pub fn detect(&mut self, u_clamped: S) -> bool {
        debug_assert!(u_clamped >= S::zero());
        let u = u_clamped.max(S::zero());
        let c = &self.config;
        self.ewma = (S::one() - c.beta) * u + c.beta * self.ewma;
        let excess = match c.baseline_decay {
            None => self.ewma,
            Some(decay) => {
                // first event: the reference is the event itself
                let reference = self.reference().unwrap_or(u);
                self.baseline = (S::one() - decay) * u + decay * self.baseline;
                self.baseline_norm = (S::one() - decay) + decay * self.baseline_norm;
                self.ewma - reference
            }
        };
        if excess > c.theta {
            self.hits = self.hits.saturating_add(1);
        } else {
            self.hits = 0;
        }
        self.hits >= c.min_hits
    }
}
