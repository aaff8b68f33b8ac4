//! Unexpectedness of discrete events, measured as the drop between the cost of
//! generating an event and the cost of describing it.
//!
//! The streaming core pairs a move-to-front memory (description side) with a
//! rate estimator (generation side). [`causal`] scores explicit cause graphs,
//! [`divergence`] compares a world distribution with a mind's code, and
//! [`simgen`] produces reproducible test streams.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

// `!(x >= 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod causal;
pub mod distribution;
pub mod divergence;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod events;
pub mod memory;
pub mod scalar;
pub mod simgen;
pub mod symbol;

pub use error::{Error, Result};
pub use memory::{Observation, StmStack};
pub use scalar::Scalar;
pub use symbol::SymbolId;

pub type BitLength = bits::BitLength<f64>;
pub type Unexpectedness = bits::Unexpectedness<f64>;
pub type DiscreteDistribution = distribution::DiscreteDistribution<f64>;
pub type CodeLengthTable = distribution::CodeLengthTable<f64>;
pub type Estimator = estimators::Estimator<f64>;
pub type EstimatorConfig = estimators::EstimatorConfig<f64>;
pub type Smoothing = estimators::Smoothing<f64>;
pub type Engine = engine::Engine<f64>;
pub type EngineConfig = engine::EngineConfig<f64>;
pub type EngineSnapshot = engine::EngineSnapshot<f64>;
pub type TraceRecord = engine::TraceRecord<f64>;

/// Single-precision engine, for memory-constrained tracking.
pub type EngineF32 = engine::Engine<f32>;

pub type CausalGraph = causal::CausalGraph<f64>;
pub type Explanation = causal::Explanation<f64>;
pub type BayesModel = causal::BayesModel<f64>;
pub type MachinePair = divergence::MachinePair<f64>;
pub type DivergenceReport = divergence::DivergenceReport<f64>;
