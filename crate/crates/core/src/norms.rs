//! Grid quadratures for `L^p` quasi-norms and the joint modulus of continuity
//! of the obstacles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

/// `(sum_{i in region} |u_i|^p h^n)^(1/p)`. Every node carries the full cell
/// volume, boundary nodes included.
pub fn lp_quasinorm(field: &ScalarField, p: f64, region: &[usize]) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::NonPositiveExponent(p));
    }
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let len = field.len();
    let mut sum = 0.0;
    for &k in region {
        if k >= len {
            return Err(Error::NodeOutOfRange { node: k, len });
        }
        sum += field.get(k).abs().powf(p);
    }
    Ok((sum * field.grid().cell_volume()).powf(1.0 / p))
}

/// Quasi-triangle constant: `||u+v||_p <= C_p (||u||_p + ||v||_p)`.
pub fn quasi_triangle_constant(p: f64) -> f64 {
    if p >= 1.0 {
        1.0
    } else {
        2f64.powf(1.0 / p - 1.0)
    }
}

/// One sample `(r, sigma0(r))` of the obstacle modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusSample {
    pub r: f64,
    pub sigma: f64,
}

/// Lookup of sampled modulus values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub samples: Vec<ModulusSample>,
}

impl Modulus {
    /// Upper bound for `sigma0(r)` from the smallest sampled radius `>= r`.
    pub fn at(&self, r: f64) -> Result<f64> {
        self.samples
            .iter()
            .filter(|s| s.r >= r * (1.0 - 1e-12))
            .min_by(|a, b| a.r.total_cmp(&b.r))
            .map(|s| s.sigma)
            .ok_or(Error::ModulusCoverage(r))
    }

    /// A modulus that is identically zero.
    pub fn zero() -> Self {
        Modulus { samples: vec![ModulusSample { r: f64::INFINITY, sigma: 0.0 }] }
    }
}

const EXHAUSTIVE_LIMIT: usize = 10_000;

/// Samples `sigma0(r) = max{|phi(x)-phi(y)| v |psi(x)-psi(y)| : |x-y| <= r}`.
///
/// Exhaustive over node pairs up to 10^4 nodes; above that the pairs are
/// enumerated by lattice offset, which visits the same pairs in a different
/// order with memory independent of the node count.
pub fn sample_modulus(phi: &ScalarField, psi: &ScalarField, radii: &[f64]) -> Result<Modulus> {
    phi.same_grid(psi)?;
    if let Some(&r) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidRadius(r));
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i]).collect();
    let grid = *phi.grid();
    let (p, q) = (phi.values(), psi.values());
    let jump = |k: usize, l: usize| (p[k] - p[l]).abs().max((q[k] - q[l]).abs());
    // bucket[i] = max jump over pairs with sorted[i-1] < d <= sorted[i]
    let mut bucket = vec![0.0f64; sorted.len()];
    let tol = 1e-12 * grid.max_spacing();
    let mut record = |d: f64, j: f64| {
        let i = sorted.partition_point(|&r| r + tol < d);
        if i < bucket.len() && j > bucket[i] {
            bucket[i] = j;
        }
    };
    if grid.len() <= EXHAUSTIVE_LIMIT {
        for k in 0..grid.len() {
            for l in (k + 1)..grid.len() {
                record(grid.distance(k, l), jump(k, l));
            }
        }
    } else if let Some(&rmax) = sorted.last() {
        for offset in lattice_offsets(&grid, rmax + tol) {
            let d = offset_length(&grid, offset);
            for k in 0..grid.len() {
                if let Some(l) = grid.neighbor(k, offset) {
                    record(d, jump(k, l));
                }
            }
        }
    }
    let mut running = 0.0f64;
    let mut out = vec![ModulusSample { r: 0.0, sigma: 0.0 }; radii.len()];
    for (i, &orig) in order.iter().enumerate() {
        running = running.max(bucket[i]);
        out[orig] = ModulusSample { r: sorted[i], sigma: running };
    }
    Ok(Modulus { samples: out })
}

/// Half-plane of nonzero lattice offsets with physical length `<= r`.
fn lattice_offsets(grid: &Grid, r: f64) -> Vec<[isize; 2]> {
    let h = grid.spacing();
    let m0 = (r / h[0]).floor() as isize;
    let m1 = if grid.dim() == 2 { (r / h[1]).floor() as isize } else { 0 };
    let mut out = Vec::new();
    for i in 0..=m0 {
        for j in -m1..=m1 {
            if i == 0 && j <= 0 {
                continue;
            }
            if offset_length(grid, [i, j]) <= r {
                out.push([i, j]);
            }
        }
    }
    out
}

fn offset_length(grid: &Grid, offset: [isize; 2]) -> f64 {
    let h = grid.spacing();
    let mut s = (offset[0] as f64 * h[0]).powi(2);
    if grid.dim() == 2 {
        s += (offset[1] as f64 * h[1]).powi(2);
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Grid {
        Grid::interval(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = line(11);
        let u = ScalarField::constant(g, 0.0).unwrap();
        let all: Vec<usize> = (0..g.len()).collect();
        for p in [0.25, 1.0, 3.0] {
            assert_eq!(lp_quasinorm(&u, p, &all).unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_field_closed_form() {
        let g = Grid::square(0.0, 1.0, 5).unwrap();
        let u = ScalarField::constant(g, -3.0).unwrap();
        let all: Vec<usize> = (0..g.len()).collect();
        let volume = g.len() as f64 * g.cell_volume();
        for p in [0.5, 1.0, 2.5] {
            let got = lp_quasinorm(&u, p, &all).unwrap();
            assert!((got - 3.0 * volume.powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn half_exponent_triangle_constant() {
        // u = v = 1 on a region of measure one
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        let region: Vec<usize> = (0..4).collect();
        let one = ScalarField::constant(g, 1.0).unwrap();
        let two = ScalarField::constant(g, 2.0).unwrap();
        let a = lp_quasinorm(&one, 0.5, &region).unwrap();
        let s = lp_quasinorm(&two, 0.5, &region).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
        assert!((s - 2.0).abs() < 1e-14);
        assert_eq!(quasi_triangle_constant(0.5), 2.0);
        assert!(s <= quasi_triangle_constant(0.5) * (a + a));
    }

    #[test]
    fn norm_errors() {
        let g = line(5);
        let u = ScalarField::constant(g, 1.0).unwrap();
        assert_eq!(lp_quasinorm(&u, 1.0, &[]), Err(Error::EmptyRegion));
        assert!(matches!(lp_quasinorm(&u, 0.0, &[0]), Err(Error::NonPositiveExponent(_))));
    }

    #[test]
    fn modulus_of_constants_vanishes() {
        let g = line(33);
        let a = ScalarField::constant(g, 2.0).unwrap();
        let b = ScalarField::constant(g, 5.0).unwrap();
        let m = sample_modulus(&a, &b, &[0.1, 0.5, 1.0]).unwrap();
        assert!(m.samples.iter().all(|s| s.sigma == 0.0));
    }

    #[test]
    fn modulus_of_identity_is_radius() {
        let g = line(65);
        let phi = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let psi = ScalarField::constant(g, 0.0).unwrap();
        let radii = [0.03, 0.125, 0.5, 0.25];
        let m = sample_modulus(&phi, &psi, &radii).unwrap();
        let h = g.max_spacing();
        for s in &m.samples {
            assert!(s.sigma <= s.r + 1e-12 && s.sigma >= s.r - h, "{s:?}");
        }
        // order of the output follows the input radii
        assert_eq!(m.samples[3].r, 0.25);
    }

    #[test]
    fn modulus_of_square_root() {
        let g = Grid::interval(-1.0, 1.0, 257).unwrap();
        let phi = ScalarField::from_fn(g, |x| x[0].abs().sqrt()).unwrap();
        let psi = ScalarField::constant(g, 0.0).unwrap();
        let radii: Vec<f64> = (1..6).map(|k| 0.5f64.powi(k)).collect();
        let m = sample_modulus(&phi, &psi, &radii).unwrap();
        for s in &m.samples {
            assert!((s.sigma / s.r.sqrt() - 1.0).abs() < 0.05, "{s:?}");
        }
    }

    #[test]
    fn offset_scan_matches_pair_scan() {
        let g = Grid::square(0.0, 1.0, 9).unwrap();
        let phi = ScalarField::from_fn(g, |x| (3.0 * x[0]).sin() * x[1]).unwrap();
        let psi = ScalarField::from_fn(g, |x| x[0] * x[0] + 2.0).unwrap();
        let radii = [0.125, 0.2, 0.4];
        let exact = sample_modulus(&phi, &psi, &radii).unwrap();
        let mut via_offsets = vec![0.0f64; radii.len()];
        let (p, q) = (phi.values(), psi.values());
        for (i, &r) in radii.iter().enumerate() {
            for o in lattice_offsets(&g, r + 1e-12) {
                for k in 0..g.len() {
                    if let Some(l) = g.neighbor(k, o) {
                        let j = (p[k] - p[l]).abs().max((q[k] - q[l]).abs());
                        via_offsets[i] = via_offsets[i].max(j);
                    }
                }
            }
        }
        for (s, v) in exact.samples.iter().zip(via_offsets) {
            assert!((s.sigma - v).abs() < 1e-14);
        }
    }

    #[test]
    fn modulus_lookup_rounds_up() {
        let m = Modulus {
            samples: vec![
                ModulusSample { r: 0.1, sigma: 1.0 },
                ModulusSample { r: 0.2, sigma: 2.0 },
            ],
        };
        assert_eq!(m.at(0.15).unwrap(), 2.0);
        assert_eq!(m.at(0.1).unwrap(), 1.0);
        assert!(m.at(0.3).is_err());
    }
}
