//! Rectangular lattices in one or two dimensions and nodal fields on them.
//!
//! Nodes are stored in row-major order: in two dimensions the index is
//! `i1 * n2 + i2`, so the `x2` coordinate varies fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform tensor-product lattice on `[a1,b1]` or `[a1,b1] x [a2,b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    nodes: [usize; 2],
    spacing: [f64; 2],
}

impl Grid {
    pub fn new(lower: &[f64], upper: &[f64], nodes: &[usize]) -> Result<Self> {
        let dim = nodes.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1,2}}")));
        }
        if lower.len() != dim || upper.len() != dim {
            return Err(Error::InvalidGrid("bounds and node counts disagree in length".into()));
        }
        let mut grid = Grid {
            dim,
            lower: [0.0; 2],
            upper: [0.0; 2],
            nodes: [1; 2],
            spacing: [1.0; 2],
        };
        for a in 0..dim {
            let (lo, hi, n) = (lower[a], upper[a], nodes[a]);
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidGrid(format!("axis {a}: bounds [{lo}, {hi}] not ordered")));
            }
            if n < 3 {
                return Err(Error::InvalidGrid(format!("axis {a}: {n} nodes, need at least 3")));
            }
            grid.lower[a] = lo;
            grid.upper[a] = hi;
            grid.nodes[a] = n;
            grid.spacing[a] = (hi - lo) / (n - 1) as f64;
        }
        Ok(grid)
    }

    /// Convenience constructor for `[a, b]` with `n` nodes.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(&[a], &[b], &[n])
    }

    /// Convenience constructor for a square `[a, b]^2` with `n x n` nodes.
    pub fn square(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(&[a, a], &[b, b], &[n, n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    /// Largest spacing over the axes.
    pub fn max_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight carried by every node: the cell volume `h1 (* h2)`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn index(&self, ij: [usize; 2]) -> usize {
        ij[0] * self.nodes[1] + ij[1]
    }

    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        [k / self.nodes[1], k % self.nodes[1]]
    }

    /// Coordinates of node `k`; the second entry is zero in one dimension.
    pub fn coords(&self, k: usize) -> [f64; 2] {
        let ij = self.multi_index(k);
        let mut x = [0.0; 2];
        for a in 0..self.dim {
            x[a] = self.coordinate(a, ij[a]);
        }
        x
    }

    /// Coordinate of the `i`-th lattice line along `axis`. The last line is
    /// pinned to the upper bound so that endpoints are exact.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.nodes[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.spacing[axis]
        }
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let ij = self.multi_index(k);
        (0..self.dim).any(|a| ij[a] == 0 || ij[a] + 1 == self.nodes[a])
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.is_boundary(k)).collect()
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_boundary(k)).collect()
    }

    /// Neighbor of `k` displaced by a lattice offset, if it lies on the grid.
    pub fn neighbor(&self, k: usize, offset: [isize; 2]) -> Option<usize> {
        let ij = self.multi_index(k);
        let mut out = [0usize; 2];
        for a in 0..2 {
            let shifted = ij[a] as isize + offset[a];
            if shifted < 0 || shifted >= self.nodes[a] as isize {
                return None;
            }
            out[a] = shifted as usize;
        }
        Some(self.index(out))
    }

    pub fn distance(&self, k: usize, l: usize) -> f64 {
        let (x, y) = (self.coords(k), self.coords(l));
        ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
    }

    /// Euclidean distance from a point to the boundary of the rectangle.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|a| (x[a] - self.lower[a]).min(self.upper[a] - x[a]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nodes with `dist(x, boundary) > r`, the discrete `Omega_r`.
    pub fn inner_nodes(&self, r: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.distance_to_boundary(&self.coords(k)) > r)
            .collect()
    }

    /// Nodes within Euclidean distance `r` of `center` (closed discrete ball).
    pub fn ball(&self, center: &[f64], r: f64) -> Vec<usize> {
        let slack = 1e-9 * self.min_spacing();
        let mut range = [(0usize, 0usize); 2];
        for a in 0..2 {
            if a < self.dim {
                let lo = ((center[a] - r - self.lower[a]) / self.spacing[a]).floor().max(0.0) as usize;
                let hi = (((center[a] + r - self.lower[a]) / self.spacing[a]).ceil() as isize)
                    .clamp(0, self.nodes[a] as isize - 1) as usize;
                range[a] = (lo, hi);
            }
        }
        let mut out = Vec::new();
        for i in range[0].0..=range[0].1.min(self.nodes[0] - 1) {
            for j in range[1].0..=range[1].1 {
                let k = self.index([i, j]);
                let x = self.coords(k);
                let d2: f64 = (0..self.dim).map(|a| (x[a] - center[a]).powi(2)).sum();
                if d2.sqrt() <= r + slack {
                    out.push(k);
                }
            }
        }
        out
    }

    /// Index of the node nearest to a point.
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let mut ij = [0usize; 2];
        for a in 0..self.dim {
            let t = ((x[a] - self.lower[a]) / self.spacing[a]).round();
            ij[a] = (t.max(0.0) as usize).min(self.nodes[a] - 1);
        }
        self.index(ij)
    }
}

/// One finite real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldLength { expected: grid.len(), got: values.len() });
        }
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { node, value });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.coords(k)[..grid.dim()])).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Sup-norm of the difference with another field on the same grid.
    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts_and_spacing() {
        let g = Grid::new(&[-1.0, 0.0], &[1.0, 2.0], &[5, 9]).unwrap();
        assert_eq!(g.len(), 45);
        assert_eq!(g.spacing(), &[0.5, 0.25]);
        assert_eq!(g.coords(g.index([4, 8])), [1.0, 2.0]);
        assert_eq!(g.interior_nodes().len(), 3 * 7);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::interval(1.0, 0.0, 5).is_err());
        assert!(Grid::interval(0.0, 1.0, 2).is_err());
        assert!(Grid::new(&[0.0; 3], &[1.0; 3], &[3; 3]).is_err());
        assert!(Grid::new(&[0.0], &[1.0, 1.0], &[3]).is_err());
    }

    #[test]
    fn neighbors_respect_bounds() {
        let g = Grid::square(0.0, 1.0, 4);
        let g = g.unwrap();
        assert_eq!(g.neighbor(0, [-1, 0]), None);
        assert_eq!(g.neighbor(0, [1, 1]), Some(5));
        let line = Grid::interval(0.0, 1.0, 4).unwrap();
        assert_eq!(line.neighbor(1, [1, 0]), Some(2));
        assert_eq!(line.neighbor(1, [0, 1]), None);
    }

    #[test]
    fn ball_counts_nodes() {
        let g = Grid::interval(-1.0, 1.0, 21).unwrap();
        assert_eq!(g.ball(&[0.0], 0.3).len(), 7);
        let sq = Grid::square(-1.0, 1.0, 21).unwrap();
        // (0,0), 4 axis neighbors at distance 0.1
        assert_eq!(sq.ball(&[0.0, 0.0], 0.1).len(), 5);
    }

    #[test]
    fn fields_reject_nonfinite() {
        let g = Grid::interval(0.0, 1.0, 3).unwrap();
        assert!(ScalarField::new(g, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(ScalarField::new(g, vec![0.0; 2]).is_err());
    }
}
