use serde::{Deserialize, Serialize};

use super::report::SolveError;
use crate::operators::TieBreak;

/// Geometric penalty schedule `delta0, delta0 * factor, ...`, closed by `floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSchedule {
    pub initial: f64,
    pub factor: f64,
    pub floor: f64,
}

impl Default for DeltaSchedule {
    fn default() -> Self {
        DeltaSchedule { initial: 1e-2, factor: 0.5, floor: 1e-6 }
    }
}

impl DeltaSchedule {
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut d = self.initial;
        while d > self.floor * (1.0 + 1e-12) {
            out.push(d);
            d *= self.factor;
        }
        out.push(self.floor);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping threshold on the sup-norm of the (row-scaled) residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub delta_schedule: DeltaSchedule,
    /// Mollification radius; below the grid spacing the data is used as is.
    pub epsilon: f64,
    /// Newton step length factor in `(0, 1]`.
    pub damping: f64,
    pub tie_break: TieBreak,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            max_iterations: 2000,
            delta_schedule: DeltaSchedule::default(),
            epsilon: 0.0,
            damping: 1.0,
            tie_break: TieBreak::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |m: &str| Err(SolveError::Config(m.to_string()));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        let s = self.delta_schedule;
        if !(s.initial > 0.0 && s.floor > 0.0 && s.floor <= s.initial && s.factor > 0.0 && s.factor < 1.0) {
            return bad("delta schedule must be strictly decreasing from initial to a positive floor");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be nonnegative");
        }
        Ok(())
    }
}
