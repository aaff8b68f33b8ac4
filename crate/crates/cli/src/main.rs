// Range checks written as `!(x >= 0)` so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod error;
mod output;

use clap::Parser;

use cli::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let result = match cli.command {
        Command::Track(a) => commands::track(a),
        Command::Replay(a) => commands::replay(a),
        Command::Explain(a) => commands::explain(a),
        Command::Divergence(a) => commands::divergence(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    if let Err(e) = result {
        if e.is_broken_pipe() {
            std::process::exit(0);
        }
        eprintln!("unexpect: {}", e.diagnostic());
        std::process::exit(e.exit_code());
    }
}
