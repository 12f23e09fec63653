//! Holder exponents, oscillation decay and the contact-gradient diagnostic on
//! fields with known regularity.

use obstacle::analysis::{coincidence_sets, dyadic_radii, gradient_holder, holder_exponent, oscillation_decay};
use obstacle::scenario::parse_config;
use obstacle::{compute_exponents, Grid, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::interval(-1.0, 1.0, 1025)?;
    let root = ScalarField::from_fn(grid, |x| x[0].abs().sqrt())?;
    let all: Vec<usize> = (0..grid.len()).collect();
    let fit = holder_exponent(&root, &all)?;
    println!("|x|^(1/2): exponent {:.4}, seminorm {:.4}", fit.exponent.unwrap_or(f64::NAN), fit.seminorm);

    let zero = ScalarField::constant(grid, 0.0)?;
    let exponents = compute_exponents(1, 2.0, 2.0, 0.5)?;
    let trace = oscillation_decay(&root, &zero, &[0.0], &dyadic_radii(0.5, grid.max_spacing()), &exponents)?;
    for level in trace.levels.iter().take(4) {
        println!("r = {:.4}: omega {:.5}, theta {:.5}", level.r, level.omega, level.theta.unwrap_or(f64::NAN));
    }

    let problem = parse_config("example_1d_unilateral")?.build_problem()?;
    let u = problem.phi().clone();
    let partition = coincidence_sets(&u, problem.phi(), problem.psi(), 1e-9, None)?;
    let g = gradient_holder(&u, problem.phi(), problem.psi(), &partition, 0.1, problem.exponents())?;
    println!(
        "gradient of 1 - |x|^1.5: exponent {:.4} (reference {:?}), contact mismatch {:.2e}",
        g.beta_hat.unwrap_or(f64::NAN),
        g.reference,
        g.contact_mismatch
    );
    Ok(())
}
