//! Online occurrence-rate estimators.
//!
//! Both filters track `w(x)`, the recent rate at which observations match `x`.
//! `log2(1/w(x))` is then used as the long-term description cost of `x`, and
//! equally as its generation cost.

mod fir;
mod iir;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use fir::FirEstimator;
pub use iir::IirEstimator;

use crate::bits::BitLength;
use crate::error::{Error, Result};
use crate::memory::Observation;
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

/// Floor applied to `w` before taking `log2(1/w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "epsilon")]
#[derive(Default)]
pub enum Smoothing<S> {
    /// `1 / (events + tracked symbols)`.
    #[default]
    Auto,
    Fixed(S),
    /// No floor: unseen or forgotten symbols cost `+inf`.
    Off,
}


impl<S: Scalar> Smoothing<S> {
    pub fn validate(&self) -> Result<()> {
        if let Smoothing::Fixed(e) = *self {
            if !(e > S::zero() && e <= S::one()) {
                return Err(Error::param("epsilon", "must lie in (0, 1], or be auto/off"));
            }
        }
        Ok(())
    }

    pub fn floor(&self, events: u64, tracked: usize) -> S {
        match *self {
            Smoothing::Auto => {
                let denom = events as usize + tracked;
                if denom == 0 {
                    S::one()
                } else {
                    S::one() / S::of_usize(denom)
                }
            }
            Smoothing::Fixed(e) => e,
            Smoothing::Off => S::zero(),
        }
    }
}

/// Snapshot of one symbol's rate estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqEstimate<S> {
    pub symbol: SymbolId,
    pub w: S,
    /// Observations backing the estimate.
    pub support_count: u64,
}

/// Shared interface of the FIR and IIR filters.
pub trait RateEstimator<S: Scalar> {
    /// Folds one observation in. Time must strictly increase.
    fn update(&mut self, o: &Observation) -> Result<()>;

    /// Current `w(x)`; zero for untracked symbols.
    fn rate(&self, x: &SymbolId) -> S;

    fn estimate(&self, x: &SymbolId) -> FreqEstimate<S>;

    fn events_seen(&self) -> u64;

    fn last_time(&self) -> Option<u64>;

    /// Number of symbols currently carrying state.
    fn tracked(&self) -> usize;

    /// Tracked symbols with their rates, in symbol order.
    fn rates(&self) -> Vec<(SymbolId, S)>;

    /// Calls `f` on every tracked symbol and rate, in symbol order.
    fn for_each_rate(&self, f: &mut dyn FnMut(&SymbolId, S)) {
        for (x, w) in self.rates() {
            f(&x, w);
        }
    }

    fn smoothing(&self) -> Smoothing<S>;

    fn floor(&self) -> S {
        self.smoothing().floor(self.events_seen(), self.tracked())
    }

    /// Long-term cost `log2(1 / max(w(x), floor))`.
    fn complexity(&self, x: &SymbolId) -> BitLength<S> {
        ltm_complexity(self.rate(x), self.floor())
    }
}

pub(crate) fn check_time(last: Option<u64>, t: u64) -> Result<()> {
    match last {
        Some(last) if t <= last => Err(Error::NonMonotonicTime { last, got: t }),
        _ => Ok(()),
    }
}

/// Filter family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum EstimatorConfig<S> {
    Fir { window: usize },
    Iir { alpha: S, prune: bool },
}

impl<S: Scalar> Default for EstimatorConfig<S> {
    fn default() -> Self {
        EstimatorConfig::Iir {
            alpha: S::of(0.999),
            prune: false,
        }
    }
}

impl<S: Scalar> EstimatorConfig<S> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorConfig::Fir { window: 0 } => {
                Err(Error::param("window", "must be a positive integer"))
            }
            EstimatorConfig::Iir { alpha, .. } if !(alpha > S::zero() && alpha < S::one()) => {
                Err(Error::param("alpha", format!("{alpha} outside the open interval (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    /// Steps after which the filter has forgotten its start-up transient.
    pub fn burn_in(&self) -> u64 {
        match *self {
            EstimatorConfig::Fir { window } => window as u64,
            EstimatorConfig::Iir { alpha, .. } => {
                // shave rounding noise so 0.9 gives 100, not 101
                (S::of(10.0) / (S::one() - alpha) - S::of(1e-6)).ceil().to_u64().unwrap_or(u64::MAX)
            }
        }
    }
}

/// Either filter, chosen at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", bound = "S: Scalar")]
pub enum Estimator<S: Scalar> {
    Fir(FirEstimator<S>),
    Iir(IirEstimator<S>),
}

impl<S: Scalar> Estimator<S> {
    pub fn new(config: EstimatorConfig<S>, smoothing: Smoothing<S>) -> Result<Self> {
        config.validate()?;
        smoothing.validate()?;
        Ok(match config {
            EstimatorConfig::Fir { window } => Estimator::Fir(FirEstimator::new(window, smoothing)?),
            EstimatorConfig::Iir { alpha, prune } => {
                Estimator::Iir(IirEstimator::new(alpha, smoothing)?.with_pruning(prune))
            }
        })
    }

    fn inner(&self) -> &dyn RateEstimator<S> {
        match self {
            Estimator::Fir(e) => e,
            Estimator::Iir(e) => e,
        }
    }
}

impl<S: Scalar> RateEstimator<S> for Estimator<S> {
    fn update(&mut self, o: &Observation) -> Result<()> {
        match self {
            Estimator::Fir(e) => e.update(o),
            Estimator::Iir(e) => e.update(o),
        }
    }
    fn rate(&self, x: &SymbolId) -> S {
        self.inner().rate(x)
    }
    fn estimate(&self, x: &SymbolId) -> FreqEstimate<S> {
        self.inner().estimate(x)
    }
    fn events_seen(&self) -> u64 {
        self.inner().events_seen()
    }
    fn last_time(&self) -> Option<u64> {
        self.inner().last_time()
    }
    fn tracked(&self) -> usize {
        self.inner().tracked()
    }
    fn rates(&self) -> Vec<(SymbolId, S)> {
        self.inner().rates()
    }
    fn for_each_rate(&self, f: &mut dyn FnMut(&SymbolId, S)) {
        self.inner().for_each_rate(f)
    }
    fn smoothing(&self) -> Smoothing<S> {
        self.inner().smoothing()
    }
}

/// Expected number of items above `x` in a move-to-front stack when `x` is
/// drawn with probability `p` and every other draw pushes it down one slot:
/// `1/p - 1`.
pub fn expected_position<S: Scalar>(p: S) -> Result<S> {
    if !(p > S::zero() && p <= S::one()) {
        return Err(Error::param("p", format!("{p} outside (0, 1]")));
    }
    Ok(S::one() / p - S::one())
}

/// `log2(1 / max(w, floor))`; `+inf` only when both are zero.
pub fn ltm_complexity<S: Scalar>(w: S, floor: S) -> BitLength<S> {
    let w = w.max(floor).min(S::one());
    if w <= S::zero() {
        return BitLength::infinite();
    }
    BitLength::new((-w.log2()).max(S::zero())).expect("finite nonnegative")
}

/// True iff the last `window` values span at most `delta`.
pub fn is_stable<S: Scalar>(history: &[S], window: usize, delta: S) -> Result<bool> {
    if window == 0 {
        return Err(Error::param("stability-m", "must be at least 1"));
    }
    if history.len() < window {
        return Err(Error::InsufficientHistory {
            needed: window,
            have: history.len(),
        });
    }
    let tail = &history[history.len() - window..];
    let (lo, hi) = tail
        .iter()
        .fold((S::infinity(), S::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(hi - lo <= delta)
}

/// Sliding record of recent `w` values for the stability test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityWindow<S> {
    window: usize,
    values: VecDeque<S>,
}

impl<S: Scalar> StabilityWindow<S> {
    pub fn new(window: usize) -> Self {
        StabilityWindow {
            window,
            values: VecDeque::with_capacity(window),
        }
    }

    pub fn push(&mut self, w: S) {
        if self.values.len() == self.window {
            self.values.pop_front();
        }
        self.values.push_back(w);
    }

    /// `None` until `window` values have been seen.
    pub fn is_stable(&self, delta: S) -> Option<bool> {
        let (a, b) = self.values.as_slices();
        let joined: Vec<S> = a.iter().chain(b).copied().collect();
        is_stable(&joined, self.window, delta).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_position_examples() {
        assert_eq!(expected_position(1.0f64).unwrap(), 0.0);
        assert_eq!(expected_position(0.5f64).unwrap(), 1.0);
        assert!((expected_position(0.1f64).unwrap() - 9.0).abs() < 1e-12);
        assert!(expected_position(0.0f64).is_err());
        assert!(expected_position(-0.2f64).is_err());
    }

    #[test]
    fn expected_position_matches_series() {
        // sum_n n p (1-p)^n, truncated once the remaining tail is below 1e-12
        for &p in &[0.05f64, 0.1, 0.3, 0.5, 0.9, 1.0] {
            let mut sum = 0.0;
            let q = 1.0 - p;
            let mut n = 0u32;
            loop {
                let term = n as f64 * p * q.powi(n as i32);
                sum += term;
                n += 1;
                // tail bound: sum_{k>=n} k p q^k <= n q^n / p  (geometric majorant)
                let tail = (n as f64 + 1.0 / p) * q.powi(n as i32);
                if q == 0.0 || tail < 1e-12 {
                    break;
                }
            }
            let closed = expected_position(p).unwrap();
            assert!((sum - closed).abs() < 1e-9, "p={p}: series {sum} vs {closed}");
        }
    }

    #[test]
    fn ltm_complexity_examples() {
        assert_eq!(ltm_complexity(1.0f64, 0.0).value(), 0.0);
        assert_eq!(ltm_complexity(0.25f64, 0.0).value(), 2.0);
        assert_eq!(ltm_complexity(0.0f64, (-20.0f64).exp2()).value(), 20.0);
        assert!(!ltm_complexity(0.0f64, 0.0).is_finite());
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable(&[0.3f64; 10], 5, 1e-6).unwrap());
        assert!(!is_stable(&[0.1f64, 0.5], 2, 0.1).unwrap());
        assert!(matches!(
            is_stable(&[0.1f64], 2, 0.1),
            Err(Error::InsufficientHistory { needed: 2, have: 1 })
        ));
    }

    #[test]
    fn stability_window_slides() {
        let mut w = StabilityWindow::new(3);
        w.push(0.0f64);
        w.push(1.0);
        assert_eq!(w.is_stable(0.1), None);
        w.push(0.5);
        assert_eq!(w.is_stable(0.1), Some(false));
        for _ in 0..3 {
            w.push(0.5);
        }
        assert_eq!(w.is_stable(0.1), Some(true));
    }

    #[test]
    fn smoothing_floor() {
        assert_eq!(Smoothing::<f64>::Auto.floor(6, 2), 0.125);
        assert_eq!(Smoothing::<f64>::Auto.floor(0, 0), 1.0);
        assert_eq!(Smoothing::Fixed(0.01f64).floor(100, 3), 0.01);
        assert_eq!(Smoothing::<f64>::Off.floor(100, 3), 0.0);
        assert!(Smoothing::Fixed(0.0f64).validate().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::Iir { alpha: 1.5f64, prune: false }.validate().is_err());
        assert!(EstimatorConfig::Iir { alpha: 0.0f64, prune: false }.validate().is_err());
        assert!(EstimatorConfig::<f64>::Fir { window: 0 }.validate().is_err());
        assert_eq!(EstimatorConfig::Iir { alpha: 0.9f64, prune: false }.burn_in(), 100);
    }
}
