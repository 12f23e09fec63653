use crate::error::{Error, Result};
use crate::exponents::ExponentSet;
use crate::grid::{Grid, ScalarField};
use crate::operators::OperatorSpec;

/// Raw inputs of a bilateral obstacle problem
/// `min{max{F(x,Du,D^2u) - f, u - psi}, u - phi} = 0`, `u = g` on the boundary.
#[derive(Debug, Clone)]
pub struct ProblemData {
    pub grid: Grid,
    pub operator: OperatorSpec,
    pub f: ScalarField,
    pub phi: ScalarField,
    pub psi: ScalarField,
    /// Only boundary values are read.
    pub g: ScalarField,
    pub exponents: ExponentSet,
    /// Declared separation `psi - phi >= r0`.
    pub r0: Option<f64>,
}

/// A validated problem instance. `mu` is the operator's gradient bound sampled
/// on the grid; `lambda`/`Lambda` are the operator's ellipticity tags.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    grid: Grid,
    operator: OperatorSpec,
    lambda: f64,
    big_lambda: f64,
    mu: ScalarField,
    f: ScalarField,
    phi: ScalarField,
    psi: ScalarField,
    g: ScalarField,
    exponents: ExponentSet,
    r0: Option<f64>,
}

impl ProblemSpec {
    pub fn new(data: ProblemData) -> Result<Self> {
        let ProblemData { grid, operator, f, phi, psi, g, exponents, r0 } = data;
        if operator.dim() != grid.dim() {
            return Err(Error::Dimension { expected: grid.dim(), got: operator.dim() });
        }
        for field in [&f, &phi, &psi, &g] {
            if *field.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        let mu = ScalarField::from_fn(grid, |x| operator.gradient_bound(x))?;
        if let Some(node) = mu.values().iter().position(|&m| m < 0.0) {
            return Err(Error::ProblemData { constraint: "mu >= 0", node });
        }
        let (lo, hi, gv) = (phi.values(), psi.values(), g.values());
        if let Some(node) = (0..grid.len()).find(|&k| lo[k] > hi[k]) {
            return Err(Error::ProblemData { constraint: "phi <= psi", node });
        }
        if let Some(node) = grid.boundary_nodes().into_iter().find(|&k| gv[k] < lo[k] || gv[k] > hi[k]) {
            return Err(Error::ProblemData { constraint: "phi <= g <= psi on the boundary", node });
        }
        if let Some(r0) = r0 {
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(Error::ProblemData { constraint: "r0 > 0", node: 0 });
            }
            if let Some(node) = (0..grid.len()).find(|&k| hi[k] - lo[k] < r0) {
                return Err(Error::ProblemData { constraint: "psi - phi >= r0", node });
            }
        }
        let e = operator.ellipticity();
        Ok(ProblemSpec {
            grid,
            lambda: e.lambda,
            big_lambda: e.big_lambda,
            operator,
            mu,
            f,
            phi,
            psi,
            g,
            exponents,
            r0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.operator
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }

    pub fn mu(&self) -> &ScalarField {
        &self.mu
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }

    pub fn g(&self) -> &ScalarField {
        &self.g
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }

    pub fn r0(&self) -> Option<f64> {
        self.r0
    }

    /// Same operator and grid with replaced data, revalidated.
    pub fn with_data(&self, f: ScalarField, phi: ScalarField, psi: ScalarField, g: ScalarField) -> Result<Self> {
        ProblemSpec::new(ProblemData {
            grid: self.grid,
            operator: self.operator.clone(),
            f,
            phi,
            psi,
            g,
            exponents: self.exponents,
            r0: None,
        })
    }
}
