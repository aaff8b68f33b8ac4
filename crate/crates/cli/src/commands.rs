use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde_json::json;
use unexpect_core::causal::{from_probabilities, BayesModel, GraphFile};
use unexpect_core::distribution::DistributionFile;
use unexpect_core::divergence::{divergences, DivergenceOptions, MachinePair};
use unexpect_core::engine::{Engine, EngineSnapshot, CSV_HEADER};
use unexpect_core::events::{self, EventReader};
use unexpect_core::simgen::SourceSpec;
use unexpect_core::BitLength;

use crate::cli::{
    DivergenceArgs, ExplainArgs, ReplayArgs, ReportFormat, SimulateArgs, StreamOutput, TraceFormat,
    TrackArgs,
};
use crate::config::engine_config;
use crate::error::CliError;
use crate::output::{open_input, write_all, Sink};

fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    open_input(path)?.read_to_string(&mut text)?;
    Ok(text)
}

fn load_snapshot(path: &Path) -> Result<Engine<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io_at(path, e))?;
    Ok(Engine::restore(EngineSnapshot::from_json(&text)?)?)
}

#[derive(Default)]
struct Totals {
    events: u64,
    novelties: u64,
    flags: u64,
    first_flag: Option<u64>,
    u_sum: f64,
    u_count: u64,
}

/// Streams events through `engine`, writing the trace as it goes.
fn run(mut engine: Engine<f64>, out: &StreamOutput) -> Result<(), CliError> {
    let input = open_input(out.input.as_deref())?;
    let mut sink = Sink::open(out.out.as_deref())?;
    if out.emit == TraceFormat::Csv {
        writeln!(sink, "{CSV_HEADER}")?;
    }
    let mut totals = Totals::default();
    for item in EventReader::new(input) {
        let (line, o) = item?;
        let r = engine.step(&o).map_err(|e| unexpect_core::Error::AtLine {
            line,
            source: Box::new(e),
        })?;
        totals.events += 1;
        totals.novelties += u64::from(r.novelty);
        if r.change_flag {
            totals.flags += 1;
            totals.first_flag.get_or_insert(r.t);
        }
        if let Some(u) = r.u_raw() {
            totals.u_sum += u;
            totals.u_count += 1;
        }
        match out.emit {
            TraceFormat::Csv => writeln!(sink, "{}", r.to_csv_row())?,
            TraceFormat::Jsonl => writeln!(sink, "{}", r.to_json_line())?,
            TraceFormat::Model => {}
        }
    }
    if out.emit == TraceFormat::Model {
        let file = DistributionFile::from_code_table(&engine.mind_code()?);
        writeln!(sink, "{}", serde_json::to_string(&file).expect("model serialises"))?;
    }
    if let Some(path) = &out.snapshot_out {
        write_all(Some(path), &engine.snapshot().to_json())?;
    }
    sink.finish()?;
    if out.summary {
        let mean = if totals.u_count > 0 {
            format!("{:.6}", totals.u_sum / totals.u_count as f64)
        } else {
            "none".into()
        };
        let first = totals.first_flag.map_or("none".into(), |t| t.to_string());
        eprintln!(
            "events={} novelties={} change_flags={} first_flag_t={first} mean_u_raw={mean}",
            totals.events, totals.novelties, totals.flags
        );
    }
    Ok(())
}

pub fn track(args: TrackArgs) -> Result<(), CliError> {
    let engine = match &args.snapshot_in {
        Some(path) => {
            if let Some(flag) = args.engine.first_given() {
                return Err(CliError::usage(
                    flag,
                    "the engine configuration is fixed by --snapshot-in",
                ));
            }
            load_snapshot(path)?
        }
        None => Engine::new(engine_config(&args.engine)?)?,
    };
    run(engine, &args.output)
}

pub fn replay(args: ReplayArgs) -> Result<(), CliError> {
    if let Some(flag) = args.engine.first_given() {
        return Err(CliError::usage(
            flag,
            "replay takes its engine configuration from the snapshot",
        ));
    }
    run(load_snapshot(&args.snapshot)?, &args.output)
}

pub fn explain(args: ExplainArgs) -> Result<(), CliError> {
    let (graph, target, c_d) = match (&args.graph, &args.bayes) {
        (Some(path), None) => {
            let file = fs::File::open(path).map_err(|e| CliError::io_at(path, e))?;
            let graph = GraphFile::from_reader(file)?.to_graph::<f64>()?;
            let target = args
                .target
                .clone()
                .ok_or_else(|| CliError::usage("--target", "required with --graph"))?;
            let cd = args.cd.expect("clap requires --cd with --graph");
            if !(cd >= 0.0) || !cd.is_finite() {
                return Err(CliError::usage("--cd", "must be a finite number of bits >= 0"));
            }
            (graph, target, BitLength::new(cd)?)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io_at(path, e))?;
            let model: BayesModel<f64> = serde_json::from_str(&text).map_err(unexpect_core::Error::from)?;
            if let Some(t) = &args.target {
                if *t != model.observation {
                    return Err(CliError::usage(
                        "--target",
                        format!("{t:?} is not the model's observation {:?}", model.observation),
                    ));
                }
            }
            let (graph, cd) = from_probabilities(&model)?;
            (graph, model.observation.clone(), cd)
        }
        _ => unreachable!("clap enforces exactly one of --graph and --bayes"),
    };
    let e = graph.explain(&target, c_d)?;
    let report = json!({
        "target": e.target,
        "best_cause": e.best_cause,
        "chain": e.chain,
        "generation_cost": e.generation_cost.value(),
        "c_d": c_d.value(),
        "u_raw": e.u.raw(),
        "u_clamped": e.u.clamped(),
        "posterior": e.u.posterior(),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    write_all(args.out.as_deref(), &text)
}

pub fn divergence(args: DivergenceArgs) -> Result<(), CliError> {
    if !(args.tau > 0.0) || !args.tau.is_finite() {
        return Err(CliError::usage("--tau", "must be a positive number of bits"));
    }
    // mind first: in a pipeline the world file appears only once upstream is done
    let mind_text = read_text(args.mind.as_deref())?;
    let world_file = fs::File::open(&args.world).map_err(|e| CliError::io_at(&args.world, e))?;
    let world = DistributionFile::from_reader(world_file)?.to_distribution::<f64>()?;
    let mind = DistributionFile::from_reader(mind_text.as_bytes())?.to_code_table::<f64>()?;
    let pair = MachinePair::new(world, mind)?;
    let report = divergences(
        &pair,
        DivergenceOptions {
            normalize_mind: args.normalize_mind,
            tau: args.tau,
        },
    )?;
    let text = match args.emit {
        ReportFormat::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
        ReportFormat::Csv => report.to_csv(),
    };
    write_all(args.out.as_deref(), &text)
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = read_text(args.spec.as_deref())?;
    let spec: SourceSpec = serde_json::from_str(&text).map_err(unexpect_core::Error::from)?;
    let events = spec.iter()?;
    // check the world file before streaming anything
    let world = match &args.world_out {
        Some(_) => Some(DistributionFile::from_distribution(&spec.final_distribution()?)),
        None => None,
    };
    let mut sink = Sink::open(args.out.as_deref())?;
    for o in events {
        writeln!(sink, "{}", events::to_json_line(&o))?;
    }
    sink.finish()?;
    if let (Some(path), Some(world)) = (&args.world_out, world) {
        let text = serde_json::to_string(&world).expect("distribution serialises") + "\n";
        write_all(Some(path), &text)?;
    }
    Ok(())
}
