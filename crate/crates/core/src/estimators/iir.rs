use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_time, FreqEstimate, RateEstimator, Smoothing};
use crate::error::{Error, Result};
use crate::memory::Observation;
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Track<S> {
    w: S,
    /// Event count at which tracking began.
    since: u64,
}

/// One-pole low-pass filter: `w <- (1 - alpha) * match + alpha * w`.
///
/// New symbols start at `w = 0` and receive `1 - alpha` on their first update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IirEstimator<S> {
    alpha: S,
    smoothing: Smoothing<S>,
    prune: bool,
    state: BTreeMap<SymbolId, Track<S>>,
    events: u64,
    last_t: Option<u64>,
}

impl<S: Scalar> IirEstimator<S> {
    pub fn new(alpha: S, smoothing: Smoothing<S>) -> Result<Self> {
        if !(alpha > S::zero() && alpha < S::one()) {
            return Err(Error::param("alpha", format!("{alpha} outside the open interval (0, 1)")));
        }
        smoothing.validate()?;
        Ok(IirEstimator {
            alpha,
            smoothing,
            prune: false,
            state: BTreeMap::new(),
            events: 0,
            last_t: None,
        })
    }

    /// Drops symbols whose rate falls below half the smoothing floor.
    pub fn with_pruning(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    /// Sum of all tracked rates; tends to one as `1 - alpha^t` without pruning.
    pub fn total_mass(&self) -> S {
        crate::scalar::compensated_sum(self.state.values().map(|t| t.w))
    }
}

impl<S: Scalar> RateEstimator<S> for IirEstimator<S> {
    fn update(&mut self, o: &Observation) -> Result<()> {
        check_time(self.last_t, o.t)?;
        self.last_t = Some(o.t);
        let events = self.events;
        self.state
            .entry(o.symbol.clone())
            .or_insert(Track { w: S::zero(), since: events });
        let gain = S::one() - self.alpha;
        for (x, track) in self.state.iter_mut() {
            let hit = if *x == o.symbol { gain } else { S::zero() };
            track.w = hit + self.alpha * track.w;
        }
        self.events += 1;
        if self.prune {
            let cut = self.floor() / S::of(2.0);
            let current = &o.symbol;
            self.state.retain(|x, t| x == current || t.w >= cut);
        }
        Ok(())
    }

    fn rate(&self, x: &SymbolId) -> S {
        self.state.get(x).map_or(S::zero(), |t| t.w)
    }

    fn estimate(&self, x: &SymbolId) -> FreqEstimate<S> {
        let (w, support_count) = self
            .state
            .get(x)
            .map_or((S::zero(), 0), |t| (t.w, self.events - t.since));
        FreqEstimate {
            symbol: x.clone(),
            w,
            support_count,
        }
    }

    fn events_seen(&self) -> u64 {
        self.events
    }

    fn last_time(&self) -> Option<u64> {
        self.last_t
    }

    fn tracked(&self) -> usize {
        self.state.len()
    }

    fn rates(&self) -> Vec<(SymbolId, S)> {
        self.state.iter().map(|(k, t)| (k.clone(), t.w)).collect()
    }

    fn for_each_rate(&self, f: &mut dyn FnMut(&SymbolId, S)) {
        for (x, t) in &self.state {
            f(x, t.w);
        }
    }

    fn smoothing(&self) -> Smoothing<S> {
        self.smoothing
    }
}
