//! Sampling check of the uniform ellipticity structure condition for a Bellman
//! family, and the witness it produces for an operator that breaks it.

use obstacle::operators::{check_structure_condition, LinearCoefficients, OperatorKind, OperatorSpec};
use obstacle::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::square(-1.0, 1.0, 9)?;
    let members = vec![LinearCoefficients::isotropic(1.0), LinearCoefficients::isotropic(2.0)];
    let bellman = OperatorSpec::new(2, OperatorKind::BellmanMax(members), 1.0, 2.0)?;
    let mu = ScalarField::constant(grid, 0.0)?;
    let report = check_structure_condition(&bellman, 1.0, 2.0, &mu, 10_000, 3)?;
    println!("bellman family: max violation {:.3e} over {} samples", report.max_violation, report.samples);

    // claims Lambda = 2 but acts with weight 5
    let steep = OperatorSpec::custom(2, 1.0, 2.0, 0.0, |_, _, x| -5.0 * x.trace())?;
    let report = check_structure_condition(&steep, 1.0, 2.0, &mu, 10_000, 3)?;
    println!("mislabelled operator: max violation {:.3e}", report.max_violation);
    if let Some(w) = report.witnesses.first() {
        println!("witness at node {}: X - Y = {:?}", w.node, w.x_matrix - w.y_matrix);
    }
    Ok(())
}
