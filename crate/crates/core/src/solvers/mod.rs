//! Solvers for the discrete bilateral obstacle problem.
//!
//! [`continuation_solve`] drives the penalized equation down a schedule of
//! penalty parameters; [`solve_complementarity`] runs policy iteration on the
//! three-regime form directly. [`verify_solution`] checks any candidate.

mod common;
mod complementarity;
mod config;
mod continuation;
pub mod linear;
mod penalized;
mod report;
mod verify;

pub use complementarity::solve_complementarity;
pub use config::{DeltaSchedule, SolverConfig};
pub use continuation::continuation_solve;
pub use penalized::{solve_penalized, PenaltyData};
pub use report::{DeltaStep, LimitStep, RegimeCounts, SolveError, SolveReport, SolverKind};
pub use verify::{verify_solution, Diagnostics, Located};
