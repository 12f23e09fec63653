use super::stencil::DiscreteOperator;
use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::problem::ProblemSpec;

/// Nodewise residual of the discrete obstacle equation:
/// `min(max(F_h[u] - f, u - psi), u - phi)` inside, `u - g` on the boundary.
pub fn assemble_residual(problem: &ProblemSpec, u: &ScalarField) -> Result<ScalarField> {
    let op = DiscreteOperator::new(problem.operator(), problem.grid())?;
    assemble_with(problem, &op, u, 1.0)
}

/// As [`assemble_residual`] with the equation part divided by `scale`.
pub fn assemble_with(problem: &ProblemSpec, op: &DiscreteOperator, u: &ScalarField, scale: f64) -> Result<ScalarField> {
    let grid = problem.grid();
    if u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let v = u.values();
    let (f, phi, psi, g) = (problem.f().values(), problem.phi().values(), problem.psi().values(), problem.g().values());
    let out = (0..grid.len())
        .map(|k| {
            if grid.is_boundary(k) {
                v[k] - g[k]
            } else {
                let a = (op.apply(v, k) - f[k]) / scale;
                a.max(v[k] - psi[k]).min(v[k] - phi[k])
            }
        })
        .collect();
    ScalarField::new(*grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::compute_exponents;
    use crate::grid::Grid;
    use crate::operators::OperatorSpec;
    use crate::problem::ProblemData;

    fn poisson(phi: f64) -> ProblemSpec {
        let grid = Grid::interval(-1.0, 1.0, 17).unwrap();
        ProblemSpec::new(ProblemData {
            grid,
            operator: OperatorSpec::laplacian(1),
            f: ScalarField::constant(grid, 2.0).unwrap(),
            phi: ScalarField::from_fn(grid, |x| phi * (1.0 - x[0] * x[0])).unwrap(),
            psi: ScalarField::constant(grid, 10.0).unwrap(),
            g: ScalarField::constant(grid, 0.0).unwrap(),
            exponents: compute_exponents(1, 2.0, 2.0, 0.5).unwrap(),
            r0: None,
        })
        .unwrap()
    }

    #[test]
    fn exact_solution_has_zero_residual() {
        let p = poisson(-10.0);
        let u = ScalarField::from_fn(*p.grid(), |x| 1.0 - x[0] * x[0]).unwrap();
        let r = assemble_residual(&p, &u).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn contact_with_positive_equation_residual_is_zero() {
        // u = phi = 2(1 - x^2) gives F_h[u] - f = 4 - 2 > 0 and u - phi = 0
        let p = poisson(2.0);
        let u = p.phi().clone();
        let r = assemble_residual(&p, &u).unwrap();
        for k in p.grid().interior_nodes() {
            assert_eq!(r.get(k), 0.0);
        }
    }

    #[test]
    fn boundary_rows_measure_dirichlet_gap() {
        let p = poisson(-10.0);
        let u = ScalarField::constant(*p.grid(), 0.5).unwrap();
        let r = assemble_residual(&p, &u).unwrap();
        assert_eq!(r.get(0), 0.5);
        let exact = ScalarField::from_fn(*p.grid(), |x| 1.0 - x[0] * x[0]).unwrap();
        assert_eq!(assemble_residual(&p, &exact).unwrap().get(0), 0.0);
    }
}
