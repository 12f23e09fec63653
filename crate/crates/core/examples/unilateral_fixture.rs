//! The obstacle `phi0(x) = 1 - |x|^1.5` with `f = 0` and zero boundary data:
//! `phi0` is concave, so the solution is the obstacle itself and every interior
//! node is in contact.

use obstacle::scenario::parse_config;
use obstacle::solvers::{solve_complementarity, SolverConfig};
use obstacle::ScalarField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = parse_config("example_1d_unilateral")?;
    let problem = config.build_problem()?;
    let (u, report) = solve_complementarity(&problem, &SolverConfig::default())?;

    let exact = ScalarField::from_fn(*problem.grid(), |x| 1.0 - x[0].abs().powf(1.5))?;
    println!("nodes            {}", problem.grid().len());
    println!("policy steps     {}", report.iterations);
    println!("regimes          {:?}", report.regime_counts);
    println!("max |u - phi0|   {:.3e}", u.max_abs_diff(&exact)?);
    Ok(())
}
