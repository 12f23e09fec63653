use serde::{Deserialize, Serialize};

use super::report::RegimeCounts;
use crate::discretize::DiscreteOperator;
use crate::grid::ScalarField;
use crate::operators::{minmax_reduction, Regime};
use crate::problem::ProblemSpec;

/// Worst value of a diagnostic together with the node where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Located {
    pub value: f64,
    pub node: Option<usize>,
}

impl Located {
    fn none() -> Self {
        Located { value: 0.0, node: None }
    }

    fn push(&mut self, value: f64, node: usize) {
        if value > self.value {
            *self = Located { value, node: Some(node) };
        }
    }
}

/// Pointwise checks of a candidate solution of the discrete obstacle problem.
///
/// Equation residuals appear twice: divided by the stencil scale (the
/// quantity the solvers drive below their tolerance) and raw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub tolerance: f64,
    /// `max(u - psi, phi - u, 0)` over all nodes.
    pub obstacle_violation: Located,
    /// `|u - g|` on boundary nodes.
    pub boundary_violation: Located,
    /// `|min(max(F_h[u] - f, u - psi), u - phi)|` at interior nodes, scaled.
    pub complementarity: Located,
    /// The same quantity without scaling the equation part.
    pub complementarity_raw: f64,
    /// `(F_h[u] - f)^+` where `u > phi + tol`, scaled.
    pub subsolution: Located,
    /// `(F_h[u] - f)^-` where `u < psi - tol`, scaled.
    pub supersolution: Located,
    /// Regime selected by the min-max reduction per node; `None` on the boundary.
    pub regimes: Vec<Option<Regime>>,
    pub regime_counts: RegimeCounts,
}

impl Diagnostics {
    /// Every diagnostic is within `factor * tolerance`.
    pub fn within(&self, factor: f64) -> bool {
        let t = factor * self.tolerance;
        [
            self.obstacle_violation.value,
            self.boundary_violation.value,
            self.complementarity.value,
            self.subsolution.value,
            self.supersolution.value,
        ]
        .iter()
        .all(|&v| v <= t)
    }

    pub fn passed(&self) -> bool {
        self.within(1.0)
    }
}

/// Evaluates the obstacle constraints, the complementarity residual and the
/// three-regime consistency of `u`. Never fails on bad data: violations are
/// reported, not raised.
pub fn verify_solution(problem: &ProblemSpec, u: &ScalarField, tol: f64) -> crate::Result<Diagnostics> {
    u.same_grid(problem.g())?;
    let grid = problem.grid();
    let op = DiscreteOperator::new(problem.operator(), grid)?;
    let scale = op.row_scale();
    let v = u.values();
    let (f, phi, psi, g) = (problem.f().values(), problem.phi().values(), problem.psi().values(), problem.g().values());

    let mut d = Diagnostics {
        tolerance: tol,
        obstacle_violation: Located::none(),
        boundary_violation: Located::none(),
        complementarity: Located::none(),
        complementarity_raw: 0.0,
        subsolution: Located::none(),
        supersolution: Located::none(),
        regimes: vec![None; grid.len()],
        regime_counts: RegimeCounts::default(),
    };
    for k in 0..grid.len() {
        d.obstacle_violation.push((v[k] - psi[k]).max(phi[k] - v[k]), k);
        if grid.is_boundary(k) {
            d.boundary_violation.push((v[k] - g[k]).abs(), k);
            continue;
        }
        let raw = op.apply(v, k) - f[k];
        let eq = raw / scale;
        let mm = minmax_reduction(eq, v[k] - psi[k], v[k] - phi[k]);
        d.complementarity.push(mm.value.abs(), k);
        d.complementarity_raw = d.complementarity_raw.max(minmax_reduction(raw, v[k] - psi[k], v[k] - phi[k]).value.abs());
        d.regimes[k] = Some(mm.regime());
        if v[k] > phi[k] + tol {
            d.subsolution.push(eq, k);
        }
        if v[k] < psi[k] - tol {
            d.supersolution.push(-eq, k);
        }
    }
    d.regime_counts = RegimeCounts::from_labels(&d.regimes);
    Ok(d)
}
