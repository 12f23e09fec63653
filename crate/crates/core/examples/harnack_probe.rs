//! Weak Harnack and local maximum ratios of a solved supersolution at two
//! resolutions. The ratios should stay of the same size as the grid refines.

use obstacle::analysis::{harnack_probe, local_max_probe};
use obstacle::scenario::parse_config;
use obstacle::solvers::{solve_complementarity, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "
[grid]
lower = -1, -1
upper = 1, 1
nodes = 17, 17
[operator]
family = pucci_plus
lambda = 1
big_lambda = 2
[data]
f = 1 + 0.5*sin(3*x1)*cos(2*x2)
phi = -1000
psi = 1000
g = 0
p = 3
q = 3
";
    let base = parse_config(text)?;
    for nodes in [17, 33] {
        let problem = base.with_nodes(nodes).build_problem()?;
        let (u, _) = solve_complementarity(&problem, &SolverConfig::default())?;
        let weak = harnack_probe(&u, problem.f(), &[0.0, 0.0], 0.25, 0.5, problem.exponents())?;
        let local = local_max_probe(&u, problem.f(), &[0.0, 0.0], 0.25, 0.5, problem.exponents())?;
        println!(
            "{nodes:>3} nodes: weak Harnack ratio {:.4}, local maximum ratio {:.4}",
            weak.ratio.unwrap_or(f64::NAN),
            local.ratio.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
