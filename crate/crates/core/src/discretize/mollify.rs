use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::norms::Modulus;

/// How a field is continued outside the rectangle before convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Zero outside the domain (right-hand side, gradient bound).
    Zero,
    /// Value of the nearest node (obstacles, boundary data).
    Nearest,
}

/// Radial hat kernel `max(0, 1 - |y|/eps)` restricted to lattice offsets and
/// normalized to unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierKernel {
    radius: f64,
    weights: Vec<([isize; 2], f64)>,
}

impl MollifierKernel {
    /// `None` when `eps` is below the grid spacing on some axis.
    pub fn new(grid: &Grid, eps: f64) -> Option<Self> {
        let h = grid.spacing();
        if !(eps.is_finite() && h.iter().all(|&hi| eps >= hi)) {
            return None;
        }
        let m0 = (eps / h[0]).floor() as isize;
        let m1 = if grid.dim() == 2 { (eps / h[1]).floor() as isize } else { 0 };
        let mut weights = Vec::new();
        let mut total = 0.0;
        for i in -m0..=m0 {
            for j in -m1..=m1 {
                let mut r2 = (i as f64 * h[0]).powi(2);
                if grid.dim() == 2 {
                    r2 += (j as f64 * h[1]).powi(2);
                }
                let w = 1.0 - r2.sqrt() / eps;
                if w > 0.0 {
                    weights.push(([i, j], w));
                    total += w;
                }
            }
        }
        for (_, w) in &mut weights {
            *w /= total;
        }
        Some(MollifierKernel { radius: eps, weights })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn weights(&self) -> &[([isize; 2], f64)] {
        &self.weights
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mollified {
    pub field: ScalarField,
    /// Set when `eps` was below the grid spacing and the field was returned unchanged.
    pub identity: bool,
}

pub fn mollify(field: &ScalarField, eps: f64, extension: Extension) -> Result<Mollified> {
    let grid = *field.grid();
    let Some(kernel) = MollifierKernel::new(&grid, eps) else {
        return Ok(Mollified { field: field.clone(), identity: true });
    };
    let n = grid.nodes_per_axis();
    let v = field.values();
    let lookup = |ij: [isize; 2]| -> f64 {
        let mut c = [0usize; 2];
        for a in 0..2 {
            let len = if a < grid.dim() { n[a] as isize } else { 1 };
            if ij[a] < 0 || ij[a] >= len {
                match extension {
                    Extension::Zero => return 0.0,
                    Extension::Nearest => c[a] = ij[a].clamp(0, len - 1) as usize,
                }
            } else {
                c[a] = ij[a] as usize;
            }
        }
        v[grid.index(c)]
    };
    let out = (0..grid.len())
        .map(|k| {
            let ij = grid.multi_index(k);
            kernel
                .weights
                .iter()
                .map(|(o, w)| w * lookup([ij[0] as isize + o[0], ij[1] as isize + o[1]]))
                .sum()
        })
        .collect();
    Ok(Mollified { field: ScalarField::new(grid, out)?, identity: false })
}

/// `phi_eps = phi * rho_eps - sigma0(eps)`, `psi_eps = psi * rho_eps + sigma0(eps)`,
/// both with nearest-node extension. Checks `phi_eps <= phi <= psi <= psi_eps`
/// up to rounding and then enforces it exactly.
pub fn shift_obstacles(
    phi: &ScalarField,
    psi: &ScalarField,
    eps: f64,
    modulus: &Modulus,
) -> Result<(ScalarField, ScalarField)> {
    phi.same_grid(psi)?;
    let lo = mollify(phi, eps, Extension::Nearest)?;
    let hi = mollify(psi, eps, Extension::Nearest)?;
    if lo.identity {
        return Ok((phi.clone(), psi.clone()));
    }
    let sigma = modulus.at(eps)?;
    let mut a = lo.field.into_values();
    let mut b = hi.field.into_values();
    for k in 0..a.len() {
        a[k] -= sigma;
        b[k] += sigma;
        let (p, q) = (phi.get(k), psi.get(k));
        let noise = 1e-12 * (1.0 + p.abs() + q.abs() + sigma);
        if a[k] > p + noise || b[k] < q - noise {
            return Err(Error::ShiftOrdering { node: k });
        }
        a[k] = a[k].min(p);
        b[k] = b[k].max(q);
    }
    Ok((ScalarField::new(*phi.grid(), a)?, ScalarField::new(*psi.grid(), b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{sample_modulus, ModulusSample};

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let g = Grid::square(0.0, 1.0, 33).unwrap();
        let k = MollifierKernel::new(&g, 0.1).unwrap();
        let total: f64 = k.weights().iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
        for (o, w) in k.weights() {
            assert!(*w > 0.0);
            let mirror = k.weights().iter().find(|(p, _)| *p == [-o[0], o[1]]).unwrap();
            assert!((mirror.1 - w).abs() < 1e-15);
        }
        assert!(MollifierKernel::new(&g, 0.01).is_none());
    }

    #[test]
    fn constants_and_linears_are_preserved_inside() {
        let g = Grid::interval(0.0, 1.0, 101).unwrap();
        let c = ScalarField::constant(g, 3.0).unwrap();
        let lin = ScalarField::from_fn(g, |x| 2.0 * x[0] - 1.0).unwrap();
        let eps = 0.05;
        let mc = mollify(&c, eps, Extension::Zero).unwrap();
        let ml = mollify(&lin, eps, Extension::Zero).unwrap();
        for k in g.inner_nodes(eps) {
            assert!((mc.field.get(k) - 3.0).abs() < 1e-13);
            assert!((ml.field.get(k) - lin.get(k)).abs() < 1e-13);
        }
    }

    #[test]
    fn step_function_stays_in_range_and_monotone() {
        let g = Grid::interval(-1.0, 1.0, 201).unwrap();
        let step = ScalarField::from_fn(g, |x| if x[0] > 0.0 { 1.0 } else { 0.0 }).unwrap();
        let m = mollify(&step, 0.1, Extension::Nearest).unwrap().field;
        let v = m.values();
        assert!(v.iter().all(|&x| (-1e-15..=1.0 + 1e-15).contains(&x)));
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }

    #[test]
    fn small_radius_is_identity() {
        let g = Grid::interval(0.0, 1.0, 11).unwrap();
        let u = ScalarField::from_fn(g, |x| x[0].sin()).unwrap();
        let m = mollify(&u, 0.01, Extension::Zero).unwrap();
        assert!(m.identity);
        assert_eq!(m.field, u);
    }

    #[test]
    fn constant_obstacles_are_unchanged() {
        let g = Grid::interval(0.0, 1.0, 41).unwrap();
        let phi = ScalarField::constant(g, 0.0).unwrap();
        let psi = ScalarField::constant(g, 1.0).unwrap();
        let m = sample_modulus(&phi, &psi, &[0.1]).unwrap();
        let (a, b) = shift_obstacles(&phi, &psi, 0.1, &m).unwrap();
        assert!(a.values().iter().all(|&v| v.abs() < 1e-15));
        assert!(b.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn shifted_linear_obstacle_band() {
        let g = Grid::interval(0.0, 1.0, 101).unwrap();
        let phi = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let psi = ScalarField::constant(g, 2.0).unwrap();
        let eps = 0.05;
        let m = Modulus { samples: vec![ModulusSample { r: eps, sigma: eps }] };
        let (a, _) = shift_obstacles(&phi, &psi, eps, &m).unwrap();
        for k in 0..g.len() {
            let d = phi.get(k) - a.get(k);
            assert!((0.0..=2.0 * eps + 1e-12).contains(&d), "{k}: {d}");
        }
    }

    #[test]
    fn inconsistent_modulus_is_rejected() {
        let g = Grid::interval(0.0, 1.0, 101).unwrap();
        let phi = ScalarField::from_fn(g, |x| (10.0 * x[0]).sin()).unwrap();
        let psi = ScalarField::constant(g, 2.0).unwrap();
        let m = Modulus { samples: vec![ModulusSample { r: 0.1, sigma: 0.0 }] };
        assert!(matches!(shift_obstacles(&phi, &psi, 0.1, &m), Err(Error::ShiftOrdering { .. })));
    }
}
