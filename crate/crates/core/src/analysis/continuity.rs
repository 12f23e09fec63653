use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::norms::lp_quasinorm;
use crate::operators::{theta_estimate, OperatorSpec, SymMatrix};

/// `(1/r) ||theta(y, .)||_{L^n(B_r(y))}` with `theta` estimated on the given
/// matrix samples. Small values mean the operator is close to constant
/// coefficients near `y`; no threshold is applied.
pub fn continuity_smallness(spec: &OperatorSpec, grid: &Grid, y: usize, r: f64, samples: &[SymMatrix]) -> Result<f64> {
    if y >= grid.len() {
        return Err(Error::NodeOutOfRange { node: y, len: grid.len() });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRadius(r));
    }
    let center = grid.coords(y);
    let ball = grid.ball(&center[..grid.dim()], r);
    let mut theta = vec![0.0; grid.len()];
    for &k in &ball {
        theta[k] = theta_estimate(spec, &center[..grid.dim()], &grid.coords(k)[..grid.dim()], samples)?.value;
    }
    let field = ScalarField::new(*grid, theta)?;
    Ok(lp_quasinorm(&field, grid.dim() as f64, &ball)? / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::theta_samples;

    #[test]
    fn constant_coefficients_give_zero() {
        let grid = Grid::square(-1.0, 1.0, 17).unwrap();
        let spec = OperatorSpec::pucci_plus(2, 1.0, 2.0, 0.0).unwrap();
        let samples = theta_samples(2, 1e3, 50, 1);
        let y = grid.nearest_node(&[0.0, 0.0]);
        assert_eq!(continuity_smallness(&spec, &grid, y, 0.25, &samples).unwrap(), 0.0);
    }
}
