use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::Regime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Penalized,
    Continuation,
    Complementarity,
}

/// Counts of interior nodes per regime.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCounts {
    pub lower: usize,
    pub upper: usize,
    pub pde: usize,
}

impl RegimeCounts {
    pub fn from_labels(labels: &[Option<Regime>]) -> Self {
        let mut c = RegimeCounts::default();
        for r in labels.iter().flatten() {
            match r {
                Regime::Lower => c.lower += 1,
                Regime::Upper => c.upper += 1,
                Regime::Pde => c.pde += 1,
            }
        }
        c
    }
}

/// One penalty level of a continuation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaStep {
    pub delta: f64,
    /// `||u_delta - u_previous||_inf`; absent on the first level.
    pub tail: Option<f64>,
    /// `sup [(u - psi_eps)^+ + (phi_eps - u)^+] / delta`.
    pub penalty_bound: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Final step of a continuation run: the contact sets of the last penalized
/// solution are frozen and the constrained system is solved exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitStep {
    /// `||u - u_floor||_inf` against the last penalized iterate.
    pub tail: f64,
    pub policy_iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: SolverKind,
    pub converged: bool,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual_history: Vec<f64>,
    /// `max(u - psi, phi - u, 0)` after each policy step (policy iteration only).
    pub violation_history: Vec<f64>,
    pub delta_path: Vec<DeltaStep>,
    pub penalty_trace: Vec<f64>,
    /// Per-node regime; `None` on boundary nodes.
    pub regimes: Vec<Option<Regime>>,
    pub regime_counts: RegimeCounts,
    /// Times a node was pinned by the anti-cycling rule.
    pub frozen_nodes: usize,
    /// The mollification radius was below the grid spacing.
    pub mollification_identity: bool,
    /// Cauchy tail decreased over the last three levels (continuation only).
    pub tail_decreasing: Option<bool>,
    /// Passage from the smallest penalty to the constrained problem
    /// (continuation only).
    pub limit: Option<LimitStep>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl SolveReport {
    pub(crate) fn new(solver: SolverKind) -> Self {
        SolveReport {
            solver,
            converged: false,
            iterations: 0,
            inner_iterations: 0,
            residual_history: Vec::new(),
            violation_history: Vec::new(),
            delta_path: Vec::new(),
            penalty_trace: Vec::new(),
            regimes: Vec::new(),
            regime_counts: RegimeCounts::default(),
            frozen_nodes: 0,
            mollification_identity: true,
            tail_decreasing: None,
            limit: None,
            wall_clock: Duration::ZERO,
        }
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }

    pub(crate) fn set_regimes(&mut self, regimes: Vec<Option<Regime>>) {
        self.regime_counts = RegimeCounts::from_labels(&regimes);
        self.regimes = regimes;
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Input(#[from] crate::Error),

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("no convergence after {} iterations (last residual {:?})", .report.iterations, .report.final_residual())]
    NonConvergence { report: Box<SolveReport> },

    #[error("regime policy kept cycling at {} frozen nodes", .report.frozen_nodes)]
    PolicyCycle { report: Box<SolveReport> },

    #[error("singular linearized system at node {node}")]
    Singular { node: usize },
}

impl SolveError {
    pub(crate) fn non_convergence() -> Self {
        SolveError::NonConvergence { report: Box::new(SolveReport::new(SolverKind::Complementarity)) }
    }

    pub(crate) fn policy_cycle() -> Self {
        SolveError::PolicyCycle { report: Box::new(SolveReport::new(SolverKind::Complementarity)) }
    }

    /// Replaces the attached report of a failure, if it carries one.
    pub(crate) fn with_report(self, report: SolveReport) -> Self {
        match self {
            SolveError::NonConvergence { .. } => SolveError::NonConvergence { report: Box::new(report) },
            SolveError::PolicyCycle { .. } => SolveError::PolicyCycle { report: Box::new(report) },
            other => other,
        }
    }

    /// Partial report of a failed run, when one exists.
    pub fn report(&self) -> Option<&SolveReport> {
        match self {
            SolveError::NonConvergence { report } | SolveError::PolicyCycle { report } => Some(report),
            _ => None,
        }
    }
}
