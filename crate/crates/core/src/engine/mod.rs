//! Per-event unexpectedness over a symbol stream.
//!
//! For each observation the engine measures the short-term retrieval cost
//! (`log2` of the pre-move stack position) and the long-term cost
//! (`log2(1/w)` from the rate estimator), reports their difference, and only
//! then learns from the event: stack, estimator, detector, in that order.

mod detector;
mod trace;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use detector::{ChangeDetector, DetectorConfig};
pub use trace::{TraceRecord, CSV_HEADER};

use crate::bits::Unexpectedness;
use crate::distribution::CodeLengthTable;
use crate::error::{Error, Result};
use crate::estimators::{
    check_time, Estimator, EstimatorConfig, RateEstimator, Smoothing, StabilityWindow,
};
use crate::memory::{stm_complexity, Observation, StmStack};
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

/// Current snapshot format. Bump on any change to the serialised engine state.
pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig<S> {
    /// Number of recent `w` values inspected.
    pub window: usize,
    /// Maximum allowed spread of those values.
    pub delta: S,
}

impl<S: Scalar> Default for StabilityConfig<S> {
    fn default() -> Self {
        StabilityConfig {
            window: 100,
            delta: S::of(0.05),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig<S> {
    pub estimator: EstimatorConfig<S>,
    pub smoothing: Smoothing<S>,
    /// Short-term memory bound; `None` is unbounded.
    pub capacity: Option<usize>,
    pub detector: DetectorConfig<S>,
    pub stability: StabilityConfig<S>,
}

impl<S: Scalar> Default for EngineConfig<S> {
    fn default() -> Self {
        EngineConfig {
            estimator: EstimatorConfig::default(),
            smoothing: Smoothing::Auto,
            capacity: None,
            detector: DetectorConfig::default(),
            stability: StabilityConfig::default(),
        }
    }
}

impl<S: Scalar> EngineConfig<S> {
    pub fn validate(&self) -> Result<()> {
        self.estimator.validate()?;
        self.smoothing.validate()?;
        self.detector.validate()?;
        if self.capacity == Some(0) {
            return Err(Error::param("capacity", "must be at least 1"));
        }
        if self.stability.window == 0 {
            return Err(Error::param("stability-m", "must be at least 1"));
        }
        if !(self.stability.delta >= S::zero()) {
            return Err(Error::param("stability-delta", "must be >= 0"));
        }
        Ok(())
    }
}

/// Streaming unexpectedness tracker for one event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Engine<S: Scalar> {
    config: EngineConfig<S>,
    stack: StmStack,
    estimator: Estimator<S>,
    detector: ChangeDetector<S>,
    stability: BTreeMap<SymbolId, StabilityWindow<S>>,
    last_t: Option<u64>,
    events: u64,
}

impl<S: Scalar> Engine<S> {
    pub fn new(config: EngineConfig<S>) -> Result<Self> {
        config.validate()?;
        let stack = match config.capacity {
            Some(c) => StmStack::with_capacity(c)?,
            None => StmStack::new(),
        };
        Ok(Engine {
            stack,
            estimator: Estimator::new(config.estimator, config.smoothing)?,
            detector: ChangeDetector::new(config.detector)?,
            stability: BTreeMap::new(),
            last_t: None,
            events: 0,
            config,
        })
    }

    pub fn config(&self) -> &EngineConfig<S> {
        &self.config
    }

    pub fn stack(&self) -> &StmStack {
        &self.stack
    }

    pub fn estimator(&self) -> &Estimator<S> {
        &self.estimator
    }

    pub fn detector(&self) -> &ChangeDetector<S> {
        &self.detector
    }

    pub fn last_time(&self) -> Option<u64> {
        self.last_t
    }

    pub fn events_seen(&self) -> u64 {
        self.events
    }

    /// Measures `o`, then learns from it.
    pub fn step(&mut self, o: &Observation) -> Result<TraceRecord<S>> {
        check_time(self.last_t, o.t)?;

        let pre = self.stack.position(&o.symbol);
        let c_stm = stm_complexity(pre)?;
        let c_ltm = self.estimator.complexity(&o.symbol);
        let novelty = pre.is_none();
        let u = if novelty {
            None
        } else {
            Unexpectedness::between(c_ltm, c_stm)
        };

        self.stack.observe(&o.symbol);
        self.estimator.update(o)?;
        let change_flag = match u {
            Some(u) => self.detector.detect(u.clamped()),
            None => false,
        };
        self.track_stability();
        self.last_t = Some(o.t);
        self.events += 1;

        Ok(TraceRecord {
            t: o.t,
            symbol: o.symbol.clone(),
            c_stm,
            c_ltm,
            u,
            novelty,
            change_flag,
        })
    }

    fn track_stability(&mut self) {
        let window = self.config.stability.window;
        let stability = &mut self.stability;
        self.estimator.for_each_rate(&mut |x, w| match stability.get_mut(x) {
            Some(h) => h.push(w),
            None => {
                let mut h = StabilityWindow::new(window);
                h.push(w);
                stability.insert(x.clone(), h);
            }
        });
        if self.stability.len() != self.estimator.tracked() {
            // the estimator forgot symbols (pruning or window expiry)
            let live: BTreeMap<SymbolId, S> = self.estimator.rates().into_iter().collect();
            self.stability.retain(|x, _| live.contains_key(x));
        }
    }

    /// Whether `w(x)` has stayed within the configured band; `None` until
    /// enough history exists.
    pub fn is_stable(&self, x: &SymbolId) -> Option<bool> {
        self.stability
            .get(x)?
            .is_stable(self.config.stability.delta)
    }

    /// Tracked symbols whose rate is currently stable.
    pub fn stable_symbols(&self) -> Vec<SymbolId> {
        self.stability
            .iter()
            .filter(|(_, w)| w.is_stable(self.config.stability.delta) == Some(true))
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// Long-term code the engine has learnt: `log2(1/w)` for each symbol with
    /// nonzero rate. Its Kraft sum is the total tracked mass, so never above one.
    pub fn mind_code(&self) -> Result<CodeLengthTable<S>> {
        let (support, lengths): (Vec<_>, Vec<_>) = self
            .estimator
            .rates()
            .into_iter()
            .filter(|(_, w)| *w > S::zero())
            .map(|(x, w)| (x, (-w.log2()).max(S::zero())))
            .unzip();
        CodeLengthTable::new(support, lengths)
    }

    pub fn snapshot(&self) -> EngineSnapshot<S> {
        EngineSnapshot {
            format_version: SNAPSHOT_FORMAT_VERSION,
            engine: self.clone(),
        }
    }

    pub fn restore(snapshot: EngineSnapshot<S>) -> Result<Self> {
        if snapshot.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: snapshot.format_version,
                expected: SNAPSHOT_FORMAT_VERSION,
            });
        }
        snapshot.engine.config.validate()?;
        Ok(snapshot.engine)
    }
}

/// Versioned, serialisable engine state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct EngineSnapshot<S: Scalar> {
    pub format_version: u32,
    pub engine: Engine<S>,
}

impl<S: Scalar> EngineSnapshot<S> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("engine state serialises")
    }

    /// Parses a snapshot, checking the format version before anything else.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or(Error::VersionMismatch {
                found: 0,
                expected: SNAPSHOT_FORMAT_VERSION,
            })?;
        if found != SNAPSHOT_FORMAT_VERSION as u64 {
            return Err(Error::VersionMismatch {
                found: found.min(u32::MAX as u64) as u32,
                expected: SNAPSHOT_FORMAT_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }
}

/// Runs a fresh engine over a whole stream.
///
/// Errors carry the 1-based index of the offending event.
pub fn run_stream<S: Scalar>(
    events: impl IntoIterator<Item = Observation>,
    config: EngineConfig<S>,
) -> Result<Vec<TraceRecord<S>>> {
    let mut engine = Engine::new(config)?;
    events
        .into_iter()
        .enumerate()
        .map(|(i, o)| engine.step(&o).map_err(|e| e.at_line(i + 1)))
        .collect()
}
