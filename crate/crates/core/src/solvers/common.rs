use super::linear::BandMatrix;
use super::report::SolveError;
use crate::discretize::Row;
use crate::grid::Grid;

pub(crate) fn bandwidth(grid: &Grid) -> usize {
    if grid.dim() == 1 {
        1
    } else {
        grid.nodes_per_axis()[1] + 1
    }
}

/// Adds `row / scale` to matrix row `k`.
pub(crate) fn add_row(mat: &mut BandMatrix, grid: &Grid, k: usize, row: &Row, scale: f64) {
    for di in -1..=1isize {
        for dj in -1..=1isize {
            let c = row.coef[Row::slot([di, dj])];
            if c != 0.0 {
                let l = grid.neighbor(k, [di, dj]).expect("interior stencil");
                mat.add(k, l, c / scale);
            }
        }
    }
}

pub(crate) fn solve_band(mat: BandMatrix, rhs: Vec<f64>) -> Result<Vec<f64>, SolveError> {
    mat.solve(rhs).map_err(|node| SolveError::Singular { node })
}

/// Discrete harmonic extension of the boundary values of `g`, clamped into
/// `[lo, hi]` at interior nodes.
pub(crate) fn initial_guess(grid: &Grid, g: &[f64], lo: &[f64], hi: &[f64]) -> Result<Vec<f64>, SolveError> {
    let n = grid.len();
    let mut u = if grid.dim() == 1 {
        let (a, b) = (g[0], g[n - 1]);
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    } else {
        let mut mat = BandMatrix::zeros(n, bandwidth(grid));
        let mut rhs = vec![0.0; n];
        let h = grid.spacing();
        let (cx, cy) = (1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]));
        for k in 0..n {
            if grid.is_boundary(k) {
                mat.add(k, k, 1.0);
                rhs[k] = g[k];
            } else {
                mat.add(k, k, 2.0 * (cx + cy));
                for (o, c) in [([1, 0], cx), ([-1, 0], cx), ([0, 1], cy), ([0, -1], cy)] {
                    mat.add(k, grid.neighbor(k, o).expect("interior"), -c);
                }
            }
        }
        solve_band(mat, rhs)?
    };
    for k in 0..n {
        if grid.is_boundary(k) {
            u[k] = g[k];
        } else {
            u[k] = u[k].max(lo[k]).min(hi[k]);
        }
    }
    Ok(u)
}

pub(crate) fn sup_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
