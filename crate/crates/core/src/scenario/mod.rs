//! Configuration files, built-in scenarios and run orchestration.
//!
//! A run is described by a [`ScenarioConfig`], parsed from `key = value`
//! text or taken from the built-in table, and executed by [`run_scenario`].
//! Commands return their files in memory as [`RunArtifacts`]; writing them is
//! left to the caller.

mod artifacts;
mod builtins;
mod config;
mod expr;
mod run;

pub use artifacts::{config_hash, read_solution_csv, solution_csv, Artifact, ArtifactError, Header, SolutionTable, VERSION};
pub use builtins::{builtin_names, builtin_text};
pub use config::{
    parse_config, ConfigError, DataConfig, Family, GridConfig, LinearMember, OperatorConfig, OutputConfig, ScenarioConfig,
    SolverChoice,
};
pub use expr::{Expr, ExprError};
pub use run::{
    grid_oracle, identity_summary, run_scenario, verify_solution_file, Command, IdentitySummary, Invariant, Outcome,
    RunArtifacts, RunError, CROSS_SOLVER_LIMIT, EXACT_LEVEL, IDENTITY_DRAWS, INVARIANT_FACTOR, STRUCTURE_SAMPLES,
};
