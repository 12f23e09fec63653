use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::operators::Regime;
use crate::solvers::RegimeCounts;

/// Contact threshold that ignores solver noise and `h^2` truncation:
/// `10 * solver_tolerance + h^2`.
pub fn default_contact_tolerance(grid: &Grid, solver_tolerance: f64) -> f64 {
    10.0 * solver_tolerance + grid.max_spacing().powi(2)
}

/// Labels of the interior nodes by contact with the obstacles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimePartition {
    grid: Grid,
    labels: Vec<Option<Regime>>,
    tolerance: f64,
}

impl RegimePartition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Per-node label; `None` on boundary nodes.
    pub fn labels(&self) -> &[Option<Regime>] {
        &self.labels
    }

    pub fn label(&self, k: usize) -> Option<Regime> {
        self.labels[k]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn counts(&self) -> RegimeCounts {
        RegimeCounts::from_labels(&self.labels)
    }

    fn select(&self, regime: Regime) -> Vec<usize> {
        (0..self.labels.len()).filter(|&k| self.labels[k] == Some(regime)).collect()
    }

    /// `C^-[u]`, nodes touching the lower obstacle.
    pub fn lower_contact(&self) -> Vec<usize> {
        self.select(Regime::Lower)
    }

    /// `C^+[u]`, nodes touching the upper obstacle.
    pub fn upper_contact(&self) -> Vec<usize> {
        self.select(Regime::Upper)
    }

    /// `N[u]`, interior nodes off both obstacles.
    pub fn non_contact(&self) -> Vec<usize> {
        self.select(Regime::Pde)
    }

    /// `N_r[u]`: nodes of `N[u]` farther than `r` from the boundary and from
    /// every contact node.
    pub fn non_contact_inner(&self, r: f64) -> Result<Vec<usize>> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidRadius(r));
        }
        let contact: Vec<usize> = (0..self.labels.len())
            .filter(|&k| matches!(self.labels[k], Some(Regime::Lower | Regime::Upper)))
            .collect();
        Ok(self
            .non_contact()
            .into_iter()
            .filter(|&k| self.grid.distance_to_boundary(&self.grid.coords(k)) > r)
            .filter(|&k| contact.iter().all(|&c| self.grid.distance(k, c) > r))
            .collect())
    }
}

/// Splits the interior nodes into lower contact (`u - phi <= tol`), upper
/// contact (`psi - u <= tol`) and the rest.
///
/// A node within `tol` of both obstacles is labelled lower contact, unless a
/// separation `r0` was declared for the obstacles, in which case it is a data
/// error.
pub fn coincidence_sets(
    u: &ScalarField,
    phi: &ScalarField,
    psi: &ScalarField,
    tol: f64,
    r0: Option<f64>,
) -> Result<RegimePartition> {
    u.same_grid(phi)?;
    u.same_grid(psi)?;
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InsufficientData(format!("contact tolerance {tol} must be nonnegative")));
    }
    let grid = *u.grid();
    let mut labels = vec![None; grid.len()];
    for k in grid.interior_nodes() {
        let lower = u.get(k) - phi.get(k) <= tol;
        let upper = psi.get(k) - u.get(k) <= tol;
        if lower && upper && r0.is_some() {
            return Err(Error::AmbiguousContact { node: k });
        }
        labels[k] = Some(match (lower, upper) {
            (true, _) => Regime::Lower,
            (false, true) => Regime::Upper,
            (false, false) => Regime::Pde,
        });
    }
    Ok(RegimePartition { grid, labels, tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_equality_with_zero_tolerance() {
        let grid = Grid::interval(0.0, 1.0, 11).unwrap();
        let u = ScalarField::constant(grid, 0.5).unwrap();
        let mut phi = vec![0.0; 11];
        phi[4] = 0.5;
        let phi = ScalarField::new(grid, phi).unwrap();
        let psi = ScalarField::constant(grid, 1.0).unwrap();
        let p = coincidence_sets(&u, &phi, &psi, 0.0, None).unwrap();
        assert_eq!(p.lower_contact(), vec![4]);
        assert!(p.upper_contact().is_empty());
        assert_eq!(p.non_contact().len(), 8);
    }

    #[test]
    fn inner_non_contact_set_shrinks() {
        let grid = Grid::interval(0.0, 1.0, 21).unwrap();
        let u = ScalarField::from_fn(grid, |x| x[0]).unwrap();
        let phi = ScalarField::from_fn(grid, |x| if x[0] < 0.3 { x[0] } else { -1.0 }).unwrap();
        let psi = ScalarField::constant(grid, 2.0).unwrap();
        let p = coincidence_sets(&u, &phi, &psi, 1e-12, None).unwrap();
        let a = p.non_contact_inner(0.1).unwrap();
        let b = p.non_contact_inner(0.2).unwrap();
        assert!(b.iter().all(|k| a.contains(k)));
        assert!(b.len() < a.len());
        for &k in &a {
            let x = grid.coords(k)[0];
            assert!(x > 0.25 + 0.1 - 1e-9 && x < 0.9 + 1e-9);
        }
    }

    #[test]
    fn ambiguous_node_with_separation_is_an_error() {
        let grid = Grid::interval(0.0, 1.0, 5).unwrap();
        let u = ScalarField::constant(grid, 0.0).unwrap();
        let phi = ScalarField::constant(grid, -1e-3).unwrap();
        let psi = ScalarField::constant(grid, 1e-3).unwrap();
        assert!(coincidence_sets(&u, &phi, &psi, 1e-2, None).is_ok());
        assert_eq!(coincidence_sets(&u, &phi, &psi, 1e-2, Some(2e-3)), Err(Error::AmbiguousContact { node: 1 }));
    }
}
