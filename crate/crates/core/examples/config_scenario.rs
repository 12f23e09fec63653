//! Running a scenario from configuration text: parse, solve, analyze and look
//! at the emitted artifacts. Nothing is written to disk.

use obstacle::scenario::{parse_config, run_scenario, Command};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "
scenario = bilateral_clip_1d
seed = 11
[grid]
nodes = 257
[solver]
solver = both
";
    let config = parse_config(text)?;
    println!("canonical form:\n{}", config.serialize());

    let run = run_scenario(&config, Command::Analyze)?;
    println!("outcome {:?}, files {:?}", run.outcome, run.names());
    let report: serde_json::Value = serde_json::from_str(run.get("report.json").unwrap_or("{}"))?;
    println!("cross-solver difference {}", report["cross_solver_diff"]);
    println!("holder {}", report["holder"]);

    match parse_config("scenario = poisson_no_contact\n[operator]\nlambda = 3\nbig_lambda = 1\n") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
