use std::time::Instant;

use super::common::{add_row, bandwidth, initial_guess, solve_band};
use super::config::SolverConfig;
use super::linear::BandMatrix;
use super::report::{SolveError, SolveReport, SolverKind};
use crate::discretize::{mollify, shift_obstacles, DiscreteOperator, Extension};
use crate::grid::ScalarField;
use crate::norms::sample_modulus;
use crate::operators::Regime;
use crate::problem::ProblemSpec;

/// Mollified right-hand side and shifted obstacles used by the penalized equation.
#[derive(Debug, Clone)]
pub struct PenaltyData {
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub identity: bool,
}

impl PenaltyData {
    /// `f_eps = f * rho_eps` (zero extension), `phi_eps`, `psi_eps` shifted by
    /// the sampled obstacle modulus at `eps`. Below the grid spacing the data
    /// is returned unchanged.
    pub fn prepare(problem: &ProblemSpec, eps: f64) -> crate::Result<Self> {
        let f = mollify(problem.f(), eps, Extension::Zero)?;
        if f.identity {
            return Ok(PenaltyData {
                f: problem.f().values().to_vec(),
                phi: problem.phi().values().to_vec(),
                psi: problem.psi().values().to_vec(),
                identity: true,
            });
        }
        let modulus = sample_modulus(problem.phi(), problem.psi(), &[eps])?;
        let (phi, psi) = shift_obstacles(problem.phi(), problem.psi(), eps, &modulus)?;
        Ok(PenaltyData {
            f: f.field.into_values(),
            phi: phi.into_values(),
            psi: psi.into_values(),
            identity: false,
        })
    }

    /// `sup [(u - psi_eps)^+ + (phi_eps - u)^+] / delta` over interior nodes.
    pub fn penalty_bound(&self, problem: &ProblemSpec, u: &[f64], delta: f64) -> f64 {
        let grid = problem.grid();
        (0..grid.len())
            .filter(|&k| !grid.is_boundary(k))
            .map(|k| ((u[k] - self.psi[k]).max(0.0) + (self.phi[k] - u[k]).max(0.0)) / delta)
            .fold(0.0, f64::max)
    }
}

/// Solves `F_h[u] + (u - psi_eps)^+/delta - (phi_eps - u)^+/delta = f_eps`
/// inside, `u = g` on the boundary, by damped semismooth Newton. The penalty
/// derivative is the indicator of the strictly active branch.
pub fn solve_penalized(
    problem: &ProblemSpec,
    eps: f64,
    delta: f64,
    warm_start: Option<&ScalarField>,
    config: &SolverConfig,
) -> Result<(ScalarField, SolveReport), SolveError> {
    config.validate()?;
    let op = DiscreteOperator::new(problem.operator(), problem.grid())?;
    let data = PenaltyData::prepare(problem, eps)?;
    let warm = match warm_start {
        Some(w) => {
            w.same_grid(problem.g())?;
            Some(w.values())
        }
        None => None,
    };
    let (u, report) = penalized_core(problem, &op, &data, delta, warm, config)?;
    Ok((ScalarField::new(*problem.grid(), u)?, report))
}

pub(crate) fn penalized_core(
    problem: &ProblemSpec,
    op: &DiscreteOperator,
    data: &PenaltyData,
    delta: f64,
    warm: Option<&[f64]>,
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(SolveError::Config(format!("penalty parameter {delta} must be positive")));
    }
    let start = Instant::now();
    let grid = problem.grid();
    let g = problem.g().values();
    let scale = op.row_scale();
    let inv = 1.0 / delta;
    let mut report = SolveReport::new(SolverKind::Penalized);
    report.mollification_identity = data.identity;
    let mut u = match warm {
        Some(w) => w.to_vec(),
        None => initial_guess(grid, g, &data.phi, &data.psi)?,
    };
    for k in grid.boundary_nodes() {
        u[k] = g[k];
    }

    let residual = |u: &[f64]| -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                if grid.is_boundary(k) {
                    u[k] - g[k]
                } else {
                    let pen = inv * ((u[k] - data.psi[k]).max(0.0) - (data.phi[k] - u[k]).max(0.0));
                    (op.apply(u, k) + pen - data.f[k]) / scale
                }
            })
            .collect()
    };
    let norm = |r: &[f64]| r.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let mut r = residual(&u);
    let mut rnorm = norm(&r);
    report.residual_history.push(rnorm);
    while rnorm > config.tolerance {
        if report.iterations >= config.max_iterations {
            report.wall_clock = start.elapsed();
            return Err(SolveError::NonConvergence { report: Box::new(report) });
        }
        report.iterations += 1;
        let mut mat = BandMatrix::zeros(grid.len(), bandwidth(grid));
        for k in 0..grid.len() {
            if grid.is_boundary(k) {
                mat.add(k, k, 1.0);
                continue;
            }
            let (_, row) = op.linearize(&u, k);
            add_row(&mut mat, grid, k, &row, scale);
            let active = (u[k] > data.psi[k]) as u8 + (u[k] < data.phi[k]) as u8;
            if active > 0 {
                mat.add(k, k, inv * active as f64 / scale);
            }
        }
        let step = solve_band(mat, r.iter().map(|v| -v).collect())?;
        // backtrack on the residual norm, starting from the configured damping
        let mut t = config.damping;
        loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let rt = residual(&trial);
            let nt = norm(&rt);
            if nt < rnorm || t < 1e-4 {
                u = trial;
                r = rt;
                rnorm = nt;
                break;
            }
            t *= 0.5;
        }
        report.residual_history.push(rnorm);
    }
    report.converged = true;
    report.penalty_trace.push(data.penalty_bound(problem, &u, delta));
    report.set_regimes(
        (0..grid.len())
            .map(|k| {
                if grid.is_boundary(k) {
                    None
                } else if u[k] > data.psi[k] {
                    Some(Regime::Upper)
                } else if u[k] < data.phi[k] {
                    Some(Regime::Lower)
                } else {
                    Some(Regime::Pde)
                }
            })
            .collect(),
    );
    report.wall_clock = start.elapsed();
    Ok((u, report))
}
