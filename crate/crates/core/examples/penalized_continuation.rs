//! Penalization with continuation: the penalty parameter is halved from 1e-2
//! to 1e-6, each level warm-started from the previous one, and the last level
//! hands its contact sets to an exact constrained solve.

use obstacle::scenario::parse_config;
use obstacle::solvers::{continuation_solve, solve_penalized, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = parse_config("bilateral_clip_1d")?.with_nodes(257).build_problem()?;
    let config = SolverConfig::default();

    let (_, single) = solve_penalized(&problem, 0.0, 1e-3, None, &config)?;
    println!("single level delta=1e-3: {} Newton steps", single.iterations);

    let (u, report) = continuation_solve(&problem, &config)?;
    println!("{:>10} {:>12} {:>14} {:>6}", "delta", "tail", "penalty bound", "steps");
    for step in &report.delta_path {
        let tail = step.tail.map_or("-".to_string(), |t| format!("{t:.3e}"));
        println!("{:>10.3e} {tail:>12} {:>14.6} {:>6}", step.delta, step.penalty_bound, step.iterations);
    }
    if let Some(limit) = &report.limit {
        println!("limit step: moved {:.3e} in {} policy steps", limit.tail, limit.policy_iterations);
    }
    let top = u.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("max u = {top:.12} (upper obstacle 0.5), tail decreasing: {:?}", report.tail_decreasing);
    Ok(())
}
