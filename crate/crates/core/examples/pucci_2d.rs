//! A two-dimensional problem with the Pucci maximal operator plus a gradient
//! term, squeezed between a ring-shaped lower obstacle and a paraboloid upper
//! obstacle. Prints the regime map on a coarse sub-sample.

use obstacle::operators::Regime;
use obstacle::scenario::parse_config;
use obstacle::solvers::{solve_complementarity, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = parse_config("pucci_2d_bilateral")?.with_nodes(33).build_problem()?;
    let (u, report) = solve_complementarity(&problem, &SolverConfig::default())?;
    println!("{} policy steps, regimes {:?}", report.iterations, report.regime_counts);

    let grid = problem.grid();
    let n = grid.nodes_per_axis()[0];
    for j in (0..n).rev().step_by(2) {
        let line: String = (0..n)
            .step_by(2)
            .map(|i| match report.regimes[grid.index([i, j])] {
                None => '#',
                Some(Regime::Pde) => '.',
                Some(Regime::Upper) => '^',
                Some(Regime::Lower) => 'v',
            })
            .collect();
        println!("{line}");
    }
    println!("u at the center: {:.6}", u.get(grid.nearest_node(&[0.0, 0.0])));
    Ok(())
}
