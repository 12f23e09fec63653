//! `-u'' = 2` clipped by the upper obstacle `psi = 0.5`. Both solvers are run
//! and compared with the closed form `0.5 - (|x| - a)_+^2`, `a = 1 - 1/sqrt(2)`.

use obstacle::operators::Regime;
use obstacle::scenario::parse_config;
use obstacle::solvers::{continuation_solve, solve_complementarity, verify_solution, SolverConfig};
use obstacle::ScalarField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = parse_config("bilateral_clip_1d")?.build_problem()?;
    let config = SolverConfig::default();
    let (direct, report) = solve_complementarity(&problem, &config)?;
    let (penalized, _) = continuation_solve(&problem, &config)?;

    let a = 1.0 - 0.5f64.sqrt();
    let exact = ScalarField::from_fn(*problem.grid(), |x| 0.5 - (x[0].abs() - a).max(0.0).powi(2))?;
    let grid = problem.grid();
    let contact: Vec<f64> = (0..grid.len())
        .filter(|&k| report.regimes[k] == Some(Regime::Upper))
        .map(|k| grid.coords(k)[0])
        .collect();
    let d = verify_solution(&problem, &direct, config.tolerance)?;

    println!("upper contact set  [{:.4}, {:.4}] ({} nodes), exact [-{a:.4}, {a:.4}]", contact[0], contact[contact.len() - 1], contact.len());
    println!("error vs closed form  {:.3e}", direct.max_abs_diff(&exact)?);
    println!("solver disagreement   {:.3e}", direct.max_abs_diff(&penalized)?);
    println!("complementarity       {:.3e}", d.complementarity.value);
    Ok(())
}
