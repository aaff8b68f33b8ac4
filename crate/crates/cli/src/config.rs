//! Engine configuration from flags layered over an optional JSON file.

use std::fs::File;
use std::io::BufReader;

use serde::Deserialize;
use unexpect_core::engine::{DetectorConfig, EngineConfig, StabilityConfig};
use unexpect_core::estimators::{EstimatorConfig, Smoothing};

use crate::cli::{EngineFlags, EstimatorKind};
use crate::error::CliError;

/// Default FIR window when only `--estimator fir` is given.
pub const DEFAULT_WINDOW: usize = 10_000;

/// A number or a keyword such as `auto`/`off`, as accepted in JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumOrWord {
    Num(f64),
    Word(String),
}

impl NumOrWord {
    fn into_text(self) -> String {
        match self {
            NumOrWord::Num(x) => x.to_string(),
            NumOrWord::Word(w) => w,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    estimator: Option<String>,
    window: Option<usize>,
    alpha: Option<f64>,
    epsilon: Option<NumOrWord>,
    prune: Option<bool>,
    capacity: Option<usize>,
    beta: Option<f64>,
    theta: Option<f64>,
    min_hits: Option<u32>,
    baseline_decay: Option<NumOrWord>,
    stability_m: Option<usize>,
    stability_delta: Option<f64>,
}

fn load(flags: &EngineFlags) -> Result<FileConfig, CliError> {
    let Some(path) = &flags.config else {
        return Ok(FileConfig::default());
    };
    let file = File::open(path).map_err(|e| CliError::usage("--config", format!("{}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::usage("--config", format!("{}: {e}", path.display())))
}

fn parse_epsilon(text: &str) -> Result<Smoothing<f64>, CliError> {
    match text {
        "auto" => Ok(Smoothing::Auto),
        "off" => Ok(Smoothing::Off),
        x => x
            .parse::<f64>()
            .map(Smoothing::Fixed)
            .map_err(|_| CliError::usage("--epsilon", format!("expected auto, off or a number, got {x:?}"))),
    }
}

fn parse_decay(text: &str) -> Result<Option<f64>, CliError> {
    match text {
        "off" => Ok(None),
        x => x
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::usage("--baseline-decay", format!("expected off or a number, got {x:?}"))),
    }
}

/// Merges flags over the config file over defaults and validates the result.
pub fn engine_config(flags: &EngineFlags) -> Result<EngineConfig<f64>, CliError> {
    let file = load(flags)?;
    let defaults = EngineConfig::<f64>::default();

    let kind = match (flags.estimator, file.estimator.as_deref()) {
        (Some(k), _) => k,
        (None, Some("fir")) => EstimatorKind::Fir,
        (None, Some("iir")) | (None, None) => EstimatorKind::Iir,
        (None, Some(other)) => {
            return Err(CliError::usage("--estimator", format!("unknown estimator {other:?} (fir or iir)")))
        }
    };
    let window = flags.window.or(file.window);
    let alpha = flags.alpha.or(file.alpha);
    let prune = flags.prune || file.prune.unwrap_or(false);
    let estimator = match kind {
        EstimatorKind::Fir => {
            if alpha.is_some() {
                return Err(CliError::usage("--alpha", "applies to the iir estimator only"));
            }
            if prune {
                return Err(CliError::usage("--prune", "applies to the iir estimator only"));
            }
            EstimatorConfig::Fir {
                window: window.unwrap_or(DEFAULT_WINDOW),
            }
        }
        EstimatorKind::Iir => {
            if window.is_some() {
                return Err(CliError::usage("--window", "applies to the fir estimator only"));
            }
            let alpha = alpha.unwrap_or(match defaults.estimator {
                EstimatorConfig::Iir { alpha, .. } => alpha,
                EstimatorConfig::Fir { .. } => unreachable!("default estimator is iir"),
            });
            EstimatorConfig::Iir { alpha, prune }
        }
    };

    let smoothing = match flags.epsilon.clone().or(file.epsilon.map(NumOrWord::into_text)) {
        Some(text) => parse_epsilon(&text)?,
        None => defaults.smoothing,
    };
    let baseline_decay = match flags
        .baseline_decay
        .clone()
        .or(file.baseline_decay.map(NumOrWord::into_text))
    {
        Some(text) => parse_decay(&text)?,
        None => defaults.detector.baseline_decay,
    };
    let detector = DetectorConfig {
        beta: flags.beta.or(file.beta).unwrap_or(defaults.detector.beta),
        theta: flags.theta.or(file.theta).unwrap_or(defaults.detector.theta),
        min_hits: flags.min_hits.or(file.min_hits).unwrap_or(defaults.detector.min_hits),
        baseline_decay,
    };
    let stability = StabilityConfig {
        window: flags
            .stability_m
            .or(file.stability_m)
            .unwrap_or(defaults.stability.window),
        delta: flags
            .stability_delta
            .or(file.stability_delta)
            .unwrap_or(defaults.stability.delta),
    };
    let config = EngineConfig {
        estimator,
        smoothing,
        capacity: flags.capacity.or(file.capacity),
        detector,
        stability,
    };
    config.validate()?;
    Ok(config)
}
