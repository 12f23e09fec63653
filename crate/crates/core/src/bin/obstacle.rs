use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use obstacle::scenario::{builtin_names, builtin_text, parse_config, run_scenario, Command, Outcome, SolverChoice};

/// Bilateral obstacle problems: solve, verify, analyze and sweep.
#[derive(Debug, Parser)]
#[command(name = "obstacle", version, after_help = builtin_help())]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Configuration file, or the name of a built-in scenario.
    #[arg(long)]
    config: String,
    /// Override the solver selection of the configuration.
    #[arg(long, value_enum)]
    solver: Option<SolverChoice>,
    /// Override the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the configuration's, then `out/<name>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn builtin_help() -> String {
    format!("Built-in scenarios: {}", builtin_names().join(", "))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let text = if builtin_text(&cli.config).is_some() {
        cli.config.clone()
    } else {
        match fs::read_to_string(&cli.config) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", cli.config);
                return ExitCode::from(1);
            }
        }
    };
    let mut config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config);
            return ExitCode::from(1);
        }
    };
    if let Some(choice) = cli.solver {
        config.choice = choice;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let dir = cli
        .out
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    config.output.dir = Some(dir.display().to_string());

    let artifacts = match run_scenario(&config, cli.command) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match artifacts.write(&dir) {
        Ok(paths) => paths.iter().for_each(|p| println!("wrote {}", p.display())),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match &artifacts.outcome {
        Outcome::Success => println!("{} {}: ok", cli.command.as_str(), config.name),
        Outcome::InvariantFailure(names) => eprintln!("{} {}: invariant failure: {}", cli.command.as_str(), config.name, names.join(", ")),
        Outcome::NonConvergence(m) => eprintln!("{} {}: no convergence: {m}", cli.command.as_str(), config.name),
    }
    ExitCode::from(artifacts.outcome.exit_code() as u8)
}
