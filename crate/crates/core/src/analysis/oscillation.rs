use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ExponentSet;
use crate::grid::ScalarField;
use crate::norms::lp_quasinorm;

/// Oscillation of `u` on one ball and the decay ratio against the doubled ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationLevel {
    pub r: f64,
    /// `M_r = sup_{B_r} u`.
    pub sup: f64,
    /// `m_r = inf_{B_r} u`.
    pub inf: f64,
    /// `omega(r) = M_r - m_r`.
    pub omega: f64,
    pub omega_double: f64,
    /// `r^alpha0 * ||f||_{L^{min(p,n)}(B_{2r})}`.
    pub data_term: f64,
    /// `(omega(r) - data_term) / omega(2r)`; `None` when `omega(2r) = 0`.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationTrace {
    pub center: [f64; 2],
    /// Levels ordered by decreasing radius.
    pub levels: Vec<OscillationLevel>,
}

impl OscillationTrace {
    /// Levels whose ratio is undefined.
    pub fn flagged(&self) -> impl Iterator<Item = &OscillationLevel> {
        self.levels.iter().filter(|l| l.theta.is_none())
    }
}

/// `r_max, r_max/2, ..., ` down to (but not below) the grid spacing.
pub fn dyadic_radii(r_max: f64, h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = r_max;
    while r >= h * (1.0 - 1e-12) {
        out.push(r);
        r *= 0.5;
    }
    out
}

fn extremes(u: &ScalarField, nodes: &[usize]) -> (f64, f64) {
    nodes.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &k| {
        let v = u.get(k);
        (hi.max(v), lo.min(v))
    })
}

/// Measures `omega(r)` on concentric balls and the corrected ratios
/// `theta = (omega(r) - r^alpha0 ||f||) / omega(2r)`.
pub fn oscillation_decay(
    u: &ScalarField,
    f: &ScalarField,
    center: &[f64],
    radii: &[f64],
    exponents: &ExponentSet,
) -> Result<OscillationTrace> {
    u.same_grid(f)?;
    let grid = u.grid();
    if center.len() != grid.dim() {
        return Err(Error::Dimension { expected: grid.dim(), got: center.len() });
    }
    let reach = grid.distance_to_boundary(center);
    let slack = 1e-9 * grid.min_spacing();
    let mut radii: Vec<f64> = radii.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut levels = Vec::with_capacity(radii.len());
    for r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidRadius(r));
        }
        if 2.0 * r > reach + slack {
            return Err(Error::BallOutsideDomain { radius: 2.0 * r });
        }
        let inner = grid.ball(center, r);
        let outer = grid.ball(center, 2.0 * r);
        let (sup, inf) = extremes(u, &inner);
        let (sup2, inf2) = extremes(u, &outer);
        let omega_double = sup2 - inf2;
        let data_term = r.powf(exponents.alpha0) * lp_quasinorm(f, exponents.data_exponent(), &outer)?;
        let omega = sup - inf;
        levels.push(OscillationLevel {
            r,
            sup,
            inf,
            omega,
            omega_double,
            data_term,
            theta: (omega_double > 0.0).then(|| (omega - data_term) / omega_double),
        });
    }
    let mut c = [0.0; 2];
    c[..center.len()].copy_from_slice(center);
    Ok(OscillationTrace { center: c, levels })
}
