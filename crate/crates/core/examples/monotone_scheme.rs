//! The discrete operator is monotone: raising a neighbor value never raises a
//! residual row. Also shows consistency on a quadratic.

use obstacle::discretize::DiscreteOperator;
use obstacle::operators::OperatorSpec;
use obstacle::{Grid, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::square(-1.0, 1.0, 17)?;
    let spec = OperatorSpec::pucci_minus(2, 1.0, 4.0, 0.0)?;
    let op = DiscreteOperator::new(&spec, &grid)?;

    // P-(D^2 u) for u = x1^2 + 3 x2^2 is -Lambda * (2 + 6) = -32, reproduced exactly
    let u = ScalarField::from_fn(grid, |x| x[0] * x[0] + 3.0 * x[1] * x[1])?;
    let center = grid.nearest_node(&[0.0, 0.0]);
    println!("F_h at the center: {:.6}", op.apply(u.values(), center));

    let k = grid.nearest_node(&[0.25, -0.5]);
    let before = op.apply(u.values(), k);
    let mut bumped = u.values().to_vec();
    bumped[grid.neighbor(k, [1, 1]).expect("interior")] += 0.1;
    let after = op.apply(&bumped, k);
    println!("row {k}: {before:.6} -> {after:.6} after raising a diagonal neighbor");
    assert!(after <= before);
    Ok(())
}
