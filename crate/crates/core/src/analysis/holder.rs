use rayon::prelude::*;
use serde::Serialize;

use super::partition::RegimePartition;
use crate::error::{Error, Result};
use crate::exponents::ExponentSet;
use crate::grid::{Grid, ScalarField};
use crate::operators::Regime;

/// Largest increment of a field over node pairs at most `distance` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderBin {
    pub distance: f64,
    pub oscillation: f64,
}

/// Power-law fit `oscillation ~ C distance^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderFit {
    /// Least-squares slope in log-log coordinates, clamped to `(0, 1]`;
    /// `None` for a field that is constant on the region.
    pub exponent: Option<f64>,
    /// Unclamped slope.
    pub slope: f64,
    /// `max_bins oscillation / distance^exponent`.
    pub seminorm: f64,
    /// Root mean square of the log residuals of the fit.
    pub fit_residual: f64,
    pub bins: Vec<HolderBin>,
}

/// Distances `h, 2h, 4h, ...` up to a quarter of the region's extent.
fn dyadic_distances(grid: &Grid, region: &[usize]) -> Vec<f64> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &k in region {
        let x = grid.coords(k);
        for a in 0..2 {
            lo[a] = lo[a].min(x[a]);
            hi[a] = hi[a].max(x[a]);
        }
    }
    let extent = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
    let h = grid.min_spacing();
    let mut out = Vec::new();
    let mut d = h;
    while d <= 0.25 * extent * (1.0 + 1e-12) {
        out.push(d);
        d *= 2.0;
    }
    out
}

/// Modulus of continuity `sup {|v(x) - v(y)| : |x - y| <= d}` over region
/// pairs, for each sorted `d`.
fn modulus(grid: &Grid, values: &[f64], region: &[usize], distances: &[f64]) -> Vec<f64> {
    let slack = 1e-9 * grid.min_spacing();
    let dmax = distances.last().copied().unwrap_or(0.0) + slack;
    region
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut local = vec![0.0f64; distances.len()];
            for &l in &region[i + 1..] {
                let d = grid.distance(k, l);
                if d > dmax {
                    continue;
                }
                let jump = (values[k] - values[l]).abs();
                let first = distances.partition_point(|&b| b + slack < d);
                if first < local.len() && jump > local[first] {
                    local[first] = jump;
                }
            }
            local
        })
        .reduce(
            || vec![0.0; distances.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(y));
                a
            },
        )
        .into_iter()
        .scan(0.0f64, |acc, v| {
            *acc = acc.max(v);
            Some(*acc)
        })
        .collect()
}

fn fit(bins: Vec<HolderBin>) -> HolderFit {
    if bins.iter().all(|b| b.oscillation == 0.0) {
        return HolderFit { exponent: None, slope: 0.0, seminorm: 0.0, fit_residual: 0.0, bins };
    }
    let pts: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.oscillation > 0.0)
        .map(|b| (b.distance.ln(), b.oscillation.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let fit_residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    let exponent = slope.clamp(f64::MIN_POSITIVE, 1.0);
    let seminorm = bins.iter().map(|b| b.oscillation / b.distance.powf(exponent)).fold(0.0, f64::max);
    HolderFit { exponent: Some(exponent), slope, seminorm, fit_residual, bins }
}

/// Estimates the Holder exponent of `field` on `region` from its modulus of
/// continuity at dyadic distances.
pub fn holder_exponent(field: &ScalarField, region: &[usize]) -> Result<HolderFit> {
    holder_of_values(field.grid(), field.values(), region)
}

fn holder_of_values(grid: &Grid, values: &[f64], region: &[usize]) -> Result<HolderFit> {
    if let Some(&k) = region.iter().find(|&&k| k >= grid.len()) {
        return Err(Error::NodeOutOfRange { node: k, len: grid.len() });
    }
    let distances = dyadic_distances(grid, region);
    if distances.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "region of {} nodes spans fewer than two dyadic distance levels",
            region.len()
        )));
    }
    let osc = modulus(grid, values, region, &distances);
    Ok(fit(distances.into_iter().zip(osc).map(|(distance, oscillation)| HolderBin { distance, oscillation }).collect()))
}

/// Gradient regularity measured on `Omega_eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientHolder {
    /// Smallest fitted exponent over the gradient components.
    pub beta_hat: Option<f64>,
    /// Largest component seminorm.
    pub seminorm: f64,
    pub components: Vec<HolderFit>,
    /// `max |Du - Dphi|` over lower contact nodes and `|Du - Dpsi|` over
    /// upper contact nodes, all by central differences.
    pub contact_mismatch: f64,
    pub contact_mismatch_node: Option<usize>,
    /// Exponent the measurement is compared with, when one exists.
    pub reference: Option<f64>,
}

/// Central difference of `values` along `axis` at an interior node.
fn central(grid: &Grid, values: &[f64], k: usize, axis: usize) -> f64 {
    let mut e = [0isize; 2];
    e[axis] = 1;
    let fwd = grid.neighbor(k, e).expect("interior node");
    let bwd = grid.neighbor(k, [-e[0], -e[1]]).expect("interior node");
    (values[fwd] - values[bwd]) / (2.0 * grid.spacing()[axis])
}

/// Fits a Holder exponent to each central-difference component of `Du` on
/// `Omega_eps` and compares `Du` with the obstacle gradient at contact nodes.
pub fn gradient_holder(
    u: &ScalarField,
    phi: &ScalarField,
    psi: &ScalarField,
    partition: &RegimePartition,
    eps: f64,
    exponents: &ExponentSet,
) -> Result<GradientHolder> {
    u.same_grid(phi)?;
    u.same_grid(psi)?;
    if partition.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidRadius(eps));
    }
    let grid = u.grid();
    let region: Vec<usize> = grid.inner_nodes(eps).into_iter().filter(|&k| !grid.is_boundary(k)).collect();
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut components = Vec::with_capacity(grid.dim());
    let mut gradient = vec![0.0; grid.len()];
    for axis in 0..grid.dim() {
        for &k in &region {
            gradient[k] = central(grid, u.values(), k, axis);
        }
        components.push(holder_of_values(grid, &gradient, &region)?);
    }
    let beta_hat = components.iter().map(|c| c.exponent).try_fold(f64::INFINITY, |m, e| e.map(|e| m.min(e)));
    let seminorm = components.iter().map(|c| c.seminorm).fold(0.0, f64::max);

    let mut contact_mismatch = 0.0;
    let mut contact_mismatch_node = None;
    for &k in &region {
        let obstacle = match partition.label(k) {
            Some(Regime::Lower) => phi,
            Some(Regime::Upper) => psi,
            _ => continue,
        };
        let gap = (0..grid.dim())
            .map(|a| (central(grid, u.values(), k, a) - central(grid, obstacle.values(), k, a)).powi(2))
            .sum::<f64>()
            .sqrt();
        if gap > contact_mismatch || contact_mismatch_node.is_none() {
            contact_mismatch = gap.max(contact_mismatch);
            contact_mismatch_node = Some(k);
        }
    }
    Ok(GradientHolder {
        beta_hat,
        seminorm,
        components,
        contact_mismatch,
        contact_mismatch_node,
        reference: exponents.beta2,
    })
}
