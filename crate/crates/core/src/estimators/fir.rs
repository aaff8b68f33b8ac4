use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use super::{check_time, FreqEstimate, RateEstimator, Smoothing};
use crate::error::{Error, Result};
use crate::memory::Observation;
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

/// Sliding-window average of match indicators over the last `window` steps.
///
/// Keeps one ring of recent symbols plus per-symbol counts, which is the same
/// information as one indicator ring per symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirEstimator<S> {
    window: usize,
    smoothing: Smoothing<S>,
    recent: VecDeque<SymbolId>,
    counts: BTreeMap<SymbolId, usize>,
    registered: BTreeSet<SymbolId>,
    events: u64,
    last_t: Option<u64>,
    #[serde(skip)]
    _scalar: PhantomData<S>,
}

impl<S: Scalar> FirEstimator<S> {
    pub fn new(window: usize, smoothing: Smoothing<S>) -> Result<Self> {
        if window == 0 {
            return Err(Error::param("window", "must be a positive integer"));
        }
        smoothing.validate()?;
        Ok(FirEstimator {
            window,
            smoothing,
            recent: VecDeque::with_capacity(window.min(1 << 16)),
            counts: BTreeMap::new(),
            registered: BTreeSet::new(),
            events: 0,
            last_t: None,
            _scalar: PhantomData,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Keeps `x` tracked even while absent from the window.
    pub fn register(&mut self, x: SymbolId) {
        self.counts.entry(x.clone()).or_insert(0);
        self.registered.insert(x);
    }

    /// Matches of `x` among the last `window` steps.
    pub fn count(&self, x: &SymbolId) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }
}

impl<S: Scalar> RateEstimator<S> for FirEstimator<S> {
    fn update(&mut self, o: &Observation) -> Result<()> {
        check_time(self.last_t, o.t)?;
        self.last_t = Some(o.t);
        self.events += 1;
        *self.counts.entry(o.symbol.clone()).or_insert(0) += 1;
        self.recent.push_back(o.symbol.clone());
        if self.recent.len() > self.window {
            let old = self.recent.pop_front().expect("window nonempty");
            let c = self.counts.get_mut(&old).expect("counted");
            *c -= 1;
            if *c == 0 && !self.registered.contains(&old) {
                self.counts.remove(&old);
            }
        }
        Ok(())
    }

    fn rate(&self, x: &SymbolId) -> S {
        S::of_usize(self.count(x)) / S::of_usize(self.window)
    }

    fn estimate(&self, x: &SymbolId) -> FreqEstimate<S> {
        FreqEstimate {
            symbol: x.clone(),
            w: self.rate(x),
            support_count: self.recent.len() as u64,
        }
    }

    fn events_seen(&self) -> u64 {
        self.events
    }

    fn last_time(&self) -> Option<u64> {
        self.last_t
    }

    fn tracked(&self) -> usize {
        self.counts.len()
    }

    fn rates(&self) -> Vec<(SymbolId, S)> {
        self.counts
            .keys()
            .map(|k| (k.clone(), self.rate(k)))
            .collect()
    }

    fn for_each_rate(&self, f: &mut dyn FnMut(&SymbolId, S)) {
        for (x, &c) in &self.counts {
            f(x, S::of_usize(c) / S::of_usize(self.window));
        }
    }

    fn smoothing(&self) -> Smoothing<S> {
        self.smoothing
    }
}
