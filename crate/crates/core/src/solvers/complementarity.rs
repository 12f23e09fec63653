use std::time::Instant;

use super::common::{add_row, bandwidth, initial_guess, solve_band};
use super::config::SolverConfig;
use super::linear::BandMatrix;
use super::report::{SolveError, SolveReport, SolverKind};
use crate::discretize::DiscreteOperator;
use crate::grid::ScalarField;
use crate::operators::{minmax_with, MinMax, Regime};
use crate::problem::ProblemSpec;

const MAX_INNER: usize = 50;
const MAX_STALLS: usize = 5;

/// Equation, upper and lower components at one interior node, with the
/// equation part divided by the stencil scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Components {
    pub equation: f64,
    pub upper: f64,
    pub lower: f64,
}

impl Components {
    pub fn get(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Pde => self.equation,
            Regime::Upper => self.upper,
            Regime::Lower => self.lower,
        }
    }
}

pub(crate) fn components(
    op: &DiscreteOperator,
    u: &[f64],
    k: usize,
    f: &[f64],
    phi: &[f64],
    psi: &[f64],
) -> Components {
    Components {
        equation: (op.apply(u, k) - f[k]) / op.row_scale(),
        upper: u[k] - psi[k],
        lower: u[k] - phi[k],
    }
}

/// Tracks per-node regime history and pins nodes that flip back and forth.
struct AntiCycling {
    previous: Vec<Option<Regime>>,
    flips: Vec<u8>,
    frozen: Vec<bool>,
    pinned: usize,
}

impl AntiCycling {
    fn new(n: usize) -> Self {
        AntiCycling { previous: vec![None; n], flips: vec![0; n], frozen: vec![false; n], pinned: 0 }
    }

    /// Returns the regime to use next at node `k`.
    fn update(&mut self, k: usize, current: Regime, proposed: Regime, c: &Components) -> Regime {
        if self.frozen[k] {
            return current;
        }
        if proposed == current {
            self.flips[k] = 0;
            return current;
        }
        if self.previous[k] == Some(proposed) {
            self.flips[k] += 1;
        } else {
            self.flips[k] = 0;
        }
        self.previous[k] = Some(current);
        if self.flips[k] >= 2 {
            self.frozen[k] = true;
            self.pinned += 1;
            return if c.get(current).abs() <= c.get(proposed).abs() { current } else { proposed };
        }
        proposed
    }

    /// Releases every pinned node and clears the flip history.
    fn thaw(&mut self) {
        self.flips.iter_mut().for_each(|f| *f = 0);
        self.frozen.iter_mut().for_each(|f| *f = false);
        self.previous.iter_mut().for_each(|p| *p = None);
    }

    fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| f).count()
    }
}

/// Policy iteration on the three-regime form of the obstacle equation.
///
/// Each node carries a regime; given the regimes, the system
/// `F_h[u] = f` (equation nodes), `u = psi` (upper), `u = phi` (lower),
/// `u = g` (boundary) is solved by Newton's method (one step when `F_h` is
/// linear). Regimes are then updated nodewise from the min-max reduction of
/// `(F_h[u] - f, u - psi, u - phi)`. The run stops once the regimes are stable
/// and the residual is below the tolerance.
pub fn solve_complementarity(problem: &ProblemSpec, config: &SolverConfig) -> Result<(ScalarField, SolveReport), SolveError> {
    config.validate()?;
    let start = Instant::now();
    let grid = problem.grid();
    let op = DiscreteOperator::new(problem.operator(), grid)?;
    let data = Obstacles { f: problem.f().values(), phi: problem.phi().values(), psi: problem.psi().values() };
    let u = initial_guess(grid, problem.g().values(), data.phi, data.psi)?;
    let policy = (0..grid.len())
        .map(|k| (!grid.is_boundary(k)).then(|| data.reduce(&op, &u, k, config).1.regime()))
        .collect();
    let mut report = SolveReport::new(SolverKind::Complementarity);
    let u = policy_iteration(problem, &op, &data, u, policy, config, &mut report);
    report.wall_clock = start.elapsed();
    let u = u.map_err(|e| e.with_report(report.clone()))?;
    Ok((ScalarField::new(*grid, u)?, report))
}

/// Right-hand side and obstacles seen by the policy iteration.
pub(crate) struct Obstacles<'a> {
    pub f: &'a [f64],
    pub phi: &'a [f64],
    pub psi: &'a [f64],
}

impl Obstacles<'_> {
    fn reduce(&self, op: &DiscreteOperator, u: &[f64], k: usize, config: &SolverConfig) -> (Components, MinMax) {
        let c = components(op, u, k, self.f, self.phi, self.psi);
        (c, minmax_with(c.equation, c.upper, c.lower, config.tie_break))
    }
}

/// Alternates fixed-policy solves and nodewise policy updates starting from
/// `u` and `policy`. Counters and the final regimes are written to `report`.
pub(crate) fn policy_iteration(
    problem: &ProblemSpec,
    op: &DiscreteOperator,
    data: &Obstacles,
    mut u: Vec<f64>,
    mut policy: Vec<Option<Regime>>,
    config: &SolverConfig,
    report: &mut SolveReport,
) -> Result<Vec<f64>, SolveError> {
    let grid = problem.grid();
    let g = problem.g().values();
    let n = grid.len();
    let mut cycling = AntiCycling::new(n);
    let mut stalled = 0;

    loop {
        if report.iterations >= config.max_iterations {
            report.frozen_nodes = cycling.pinned;
            let cycle = cycling.frozen_count() > 0;
            report.set_regimes(policy);
            return Err(if cycle { SolveError::policy_cycle() } else { SolveError::non_convergence() });
        }
        report.iterations += 1;
        report.inner_iterations += solve_policy_system(problem, op, data, &policy, &mut u)?;

        let mut residual = 0.0f64;
        let mut changed = false;
        let mut next = policy.clone();
        for k in 0..n {
            let Some(current) = policy[k] else {
                residual = residual.max((u[k] - g[k]).abs());
                continue;
            };
            let (c, mm) = data.reduce(op, &u, k, config);
            residual = residual.max(mm.value.abs());
            let chosen = cycling.update(k, current, mm.regime(), &c);
            if chosen != current {
                changed = true;
            }
            next[k] = Some(chosen);
        }
        report.residual_history.push(residual);
        report.violation_history.push(obstacle_violation(&u, data));
        if !changed && residual <= config.tolerance {
            break;
        }
        if !changed {
            // a stable policy above tolerance is held by pinned nodes or by
            // an inexact inner solve; release the pins and retry a few times
            stalled += 1;
            if stalled > MAX_STALLS {
                report.frozen_nodes = cycling.pinned;
                let cycle = cycling.frozen_count() > 0;
                report.set_regimes(policy);
                return Err(if cycle { SolveError::policy_cycle() } else { SolveError::non_convergence() });
            }
            if cycling.frozen_count() > 0 {
                cycling.thaw();
                for k in 0..n {
                    if policy[k].is_some() {
                        next[k] = Some(data.reduce(op, &u, k, config).1.regime());
                    }
                }
            }
        }
        policy = next;
    }
    report.converged = true;
    report.frozen_nodes = cycling.pinned;
    report.set_regimes(policy);
    Ok(u)
}

fn obstacle_violation(u: &[f64], data: &Obstacles) -> f64 {
    u.iter()
        .zip(data.phi.iter().zip(data.psi))
        .map(|(v, (lo, hi))| (v - hi).max(lo - v).max(0.0))
        .fold(0.0, f64::max)
}

/// Newton iterations for the system defined by a fixed regime assignment.
/// Returns the number of linear solves.
fn solve_policy_system(
    problem: &ProblemSpec,
    op: &DiscreteOperator,
    data: &Obstacles,
    policy: &[Option<Regime>],
    u: &mut Vec<f64>,
) -> Result<usize, SolveError> {
    let grid = problem.grid();
    let (f, phi, psi, g) = (data.f, data.phi, data.psi, problem.g().values());
    let scale = op.row_scale();
    let residual = |u: &[f64], k: usize| -> f64 {
        match policy[k] {
            None => u[k] - g[k],
            Some(Regime::Lower) => u[k] - phi[k],
            Some(Regime::Upper) => u[k] - psi[k],
            Some(Regime::Pde) => (op.apply(u, k) - f[k]) / scale,
        }
    };
    let norm = |u: &[f64]| (0..grid.len()).map(|k| residual(u, k).abs()).fold(0.0, f64::max);
    let mut solves = 0;
    for _ in 0..MAX_INNER {
        if norm(u) == 0.0 {
            break;
        }
        let mut mat = BandMatrix::zeros(grid.len(), bandwidth(grid));
        let mut rhs = vec![0.0; grid.len()];
        for k in 0..grid.len() {
            match policy[k] {
                Some(Regime::Pde) => {
                    let (value, row) = op.linearize(u, k);
                    add_row(&mut mat, grid, k, &row, scale);
                    rhs[k] = -(value - f[k]) / scale;
                }
                _ => {
                    mat.add(k, k, 1.0);
                    rhs[k] = -residual(u, k);
                }
            }
        }
        let step = solve_band(mat, rhs)?;
        solves += 1;
        // full steps: the equation rows are convex or concave in u, so the
        // iteration is monotone without a line search
        let size = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let level = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (v, s) in u.iter_mut().zip(&step) {
            *v += s;
        }
        if size <= 1e-14 * level {
            break;
        }
    }
    Ok(solves)
}
