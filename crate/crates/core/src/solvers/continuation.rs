use std::time::Instant;

use super::common::sup_norm_diff;
use super::complementarity::{policy_iteration, Obstacles};
use super::config::SolverConfig;
use super::penalized::{penalized_core, PenaltyData};
use super::report::{DeltaStep, LimitStep, SolveError, SolveReport, SolverKind};
use crate::discretize::DiscreteOperator;
use crate::grid::ScalarField;
use crate::problem::ProblemSpec;

/// Runs the penalized solver down the configured delta schedule, warm-starting
/// each level from the previous one and recording the Cauchy tail
/// `||u_delta - u_previous||_inf` and the penalty bound per level.
///
/// The contact sets of the last level then seed a policy iteration on the
/// constrained problem, which removes the `O(delta)` obstacle overshoot of
/// the penalized solution. Its outcome is recorded in [`SolveReport::limit`].
pub fn continuation_solve(problem: &ProblemSpec, config: &SolverConfig) -> Result<(ScalarField, SolveReport), SolveError> {
    config.validate()?;
    let start = Instant::now();
    let op = DiscreteOperator::new(problem.operator(), problem.grid())?;
    let data = PenaltyData::prepare(problem, config.epsilon)?;
    let mut report = SolveReport::new(SolverKind::Continuation);
    report.mollification_identity = data.identity;
    let mut current: Option<Vec<f64>> = None;
    for delta in config.delta_schedule.values() {
        let step = penalized_core(problem, &op, &data, delta, current.as_deref(), config);
        let (u, inner) = match step {
            Ok(v) => v,
            Err(SolveError::NonConvergence { report: inner }) => {
                report.iterations += inner.iterations;
                report.residual_history.extend(&inner.residual_history);
                report.wall_clock = start.elapsed();
                return Err(SolveError::NonConvergence { report: Box::new(report) });
            }
            Err(e) => return Err(e),
        };
        let penalty_bound = inner.penalty_trace.last().copied().unwrap_or(0.0);
        report.delta_path.push(DeltaStep {
            delta,
            tail: current.as_deref().map(|prev| sup_norm_diff(prev, &u)),
            penalty_bound,
            iterations: inner.iterations,
            residual: inner.final_residual().unwrap_or(0.0),
        });
        report.penalty_trace.push(penalty_bound);
        report.iterations += inner.iterations;
        report.residual_history.extend(&inner.residual_history);
        report.set_regimes(inner.regimes);
        current = Some(u);
    }
    // tails already at the tolerance level count as decreasing
    let tails: Vec<f64> = report.delta_path.iter().filter_map(|s| s.tail).collect();
    let settled = |w: &[f64]| w[1] < w[0] || w[1] <= config.tolerance;
    report.tail_decreasing = Some(tails.len() < 3 || tails[tails.len() - 3..].windows(2).all(settled));
    let floor = current.expect("schedule has at least one level");
    let obstacles = Obstacles { f: &data.f, phi: &data.phi, psi: &data.psi };
    let mut inner = SolveReport::new(SolverKind::Continuation);
    let limit = policy_iteration(problem, &op, &obstacles, floor.clone(), report.regimes.clone(), config, &mut inner);
    report.iterations += inner.iterations;
    report.inner_iterations += inner.inner_iterations;
    report.residual_history.extend(&inner.residual_history);
    report.violation_history = inner.violation_history.clone();
    report.wall_clock = start.elapsed();
    let u = limit.map_err(|e| e.with_report(report.clone()))?;
    report.limit = Some(LimitStep {
        tail: sup_norm_diff(&floor, &u),
        policy_iterations: inner.iterations,
        residual: inner.final_residual().unwrap_or(0.0),
    });
    report.set_regimes(inner.regimes);
    report.converged = true;
    Ok((ScalarField::new(*problem.grid(), u)?, report))
}
