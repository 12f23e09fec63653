use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::artifacts::{read_solution_csv, solution_csv, to_json, write_artifacts, Artifact, ArtifactError, Header, LongTable};
use super::config::{ConfigError, ScenarioConfig, SolverChoice};
use crate::analysis::{
    coincidence_sets, continuity_smallness, default_contact_tolerance, dyadic_radii, gradient_holder, harnack_probe,
    holder_exponent, local_max_probe, oscillation_decay, HarnackProbe,
};
use crate::exponents::ExponentSet;
use crate::grid::ScalarField;
use crate::operators::{check_structure_condition, minmax_reduction, theta_samples, DEFAULT_NORM_CAP};
use crate::problem::ProblemSpec;
use crate::solvers::{
    continuation_solve, solve_complementarity, verify_solution, DeltaSchedule, DeltaStep, Diagnostics, LimitStep, Located,
    RegimeCounts, SolveError, SolveReport, SolverConfig,
};

/// Samples drawn by the structure-condition check of every solve.
pub const STRUCTURE_SAMPLES: usize = 10_000;
/// Draws of the min-max identity test.
pub const IDENTITY_DRAWS: usize = 100_000;
/// Largest admissible sup-norm distance between the two solvers.
pub const CROSS_SOLVER_LIMIT: f64 = 1e-4;
/// Residuals up to this factor of the solver tolerance pass the invariants.
pub const INVARIANT_FACTOR: f64 = 10.0;
/// Errors below this level count as exact in grid sweeps.
pub const EXACT_LEVEL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Solve and verify the discrete problem.
    Solve,
    /// Re-check a previously written solution file.
    Verify,
    /// Solve, then measure contact sets, oscillation and regularity.
    Analyze,
    /// Errors at h, h/2 and h/4.
    SweepH,
    /// Continuation tail and penalty bound per penalty level.
    SweepDelta,
    /// Compare the min-max reduction against brute-force oracles.
    IdentityTest,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Analyze => "analyze",
            Command::SweepH => "sweep-h",
            Command::SweepDelta => "sweep-delta",
            Command::IdentityTest => "identity-test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success,
    /// Names of the failed invariants.
    InvariantFailure(Vec<String>),
    NonConvergence(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::InvariantFailure(_) => 2,
            Outcome::NonConvergence(_) => 3,
        }
    }
}

/// Files produced by one command, held in memory, and the run's verdict.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub artifacts: Vec<Artifact>,
    pub outcome: Outcome,
}

impl RunArtifacts {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.contents.as_str())
    }

    pub fn names(&self) -> Vec<&str> {
        self.artifacts.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>, ArtifactError> {
        write_artifacts(dir, &self.artifacts)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Input(#[from] crate::Error),
    #[error(transparent)]
    Solve(SolveError),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error("verify needs an output directory holding solution.csv")]
    NoSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct Invariant {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Default)]
struct Invariants(Vec<Invariant>);

impl Invariants {
    fn check(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Invariant { name: name.into(), value, limit, passed: value <= limit });
    }

    fn require(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push(Invariant { name: name.into(), value: if ok { 0.0 } else { 1.0 }, limit: 0.0, passed: ok });
    }

    fn outcome(&self) -> Outcome {
        let failed: Vec<String> = self.0.iter().filter(|i| !i.passed).map(|i| i.name.clone()).collect();
        if failed.is_empty() {
            Outcome::Success
        } else {
            Outcome::InvariantFailure(failed)
        }
    }
}

/// Runs `command` on `config` and returns the artifacts without touching the
/// file system, except for `verify`, which reads `solution.csv` from the
/// configured output directory.
pub fn run_scenario(config: &ScenarioConfig, command: Command) -> Result<RunArtifacts, RunError> {
    let problem = config.build_problem()?;
    match command {
        Command::Solve => solve_command(config, &problem, false),
        Command::Analyze => solve_command(config, &problem, true),
        Command::Verify => verify_command(config, &problem),
        Command::SweepH => sweep_h(config),
        Command::SweepDelta => sweep_delta(config, &problem),
        Command::IdentityTest => Ok(identity_test(config)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum RunKind {
    Penalized,
    Direct,
}

struct Run {
    kind: RunKind,
    result: Result<(ScalarField, SolveReport), SolveError>,
}

impl Run {
    fn solution(&self) -> Option<(&ScalarField, &SolveReport)> {
        self.result.as_ref().ok().map(|(u, r)| (u, r))
    }
}

fn execute(problem: &ProblemSpec, solver: &SolverConfig, choice: SolverChoice) -> Vec<Run> {
    let penalized = || Run { kind: RunKind::Penalized, result: continuation_solve(problem, solver) };
    let direct = || Run { kind: RunKind::Direct, result: solve_complementarity(problem, solver) };
    match choice {
        SolverChoice::Penalized => vec![penalized()],
        SolverChoice::Direct => vec![direct()],
        SolverChoice::Both => {
            let (a, b) = rayon::join(penalized, direct);
            vec![a, b]
        }
    }
}

/// Failure that is not a convergence failure aborts the run.
fn hard_error(runs: &[Run]) -> Option<RunError> {
    runs.iter().find_map(|r| match &r.result {
        Err(SolveError::NonConvergence { .. } | SolveError::PolicyCycle { .. }) | Ok(_) => None,
        Err(e) => Some(RunError::Solve(clone_error(e))),
    })
}

fn clone_error(e: &SolveError) -> SolveError {
    match e {
        SolveError::Input(i) => SolveError::Input(i.clone()),
        SolveError::Config(m) => SolveError::Config(m.clone()),
        SolveError::Singular { node } => SolveError::Singular { node: *node },
        other => SolveError::Config(other.to_string()),
    }
}

#[derive(Debug, Clone, Serialize)]
struct DiagnosticSummary {
    obstacle_violation: Located,
    boundary_violation: Located,
    complementarity: Located,
    complementarity_raw: f64,
    subsolution: Located,
    supersolution: Located,
    regime_counts: RegimeCounts,
}

impl From<&Diagnostics> for DiagnosticSummary {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticSummary {
            obstacle_violation: d.obstacle_violation,
            boundary_violation: d.boundary_violation,
            complementarity: d.complementarity,
            complementarity_raw: d.complementarity_raw,
            subsolution: d.subsolution,
            supersolution: d.supersolution,
            regime_counts: d.regime_counts,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    solver: RunKind,
    converged: bool,
    iterations: usize,
    inner_iterations: usize,
    final_residual: Option<f64>,
    frozen_nodes: usize,
    mollification_identity: bool,
    tail_decreasing: Option<bool>,
    limit: Option<LimitStep>,
    exact_error: Option<f64>,
    diagnostics: Option<DiagnosticSummary>,
    error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
struct HolderSummary {
    u_exponent: Option<f64>,
    du_exponent: Option<f64>,
    du_reference: Option<f64>,
    contact_gradient_mismatch: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct OscillationRow {
    r: f64,
    omega: f64,
    theta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct StructureSummary {
    samples: usize,
    seed: u64,
    max_violation: f64,
    passed: bool,
}

#[derive(Debug, Clone, Serialize)]
struct ProbeSummary {
    center: Vec<f64>,
    r: f64,
    eps0: f64,
    weak_harnack: Option<HarnackProbe>,
    local_max: Option<HarnackProbe>,
    continuity_smallness: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SolveReportFile {
    header: Header,
    command: &'static str,
    residual_history: Vec<f64>,
    delta_path: Vec<DeltaStep>,
    penalty_trace: Vec<f64>,
    regime_counts: Option<RegimeCounts>,
    constraint_violation_max: Option<f64>,
    complementarity_max: Option<f64>,
    holder: HolderSummary,
    oscillation: Vec<OscillationRow>,
    primary: Option<RunKind>,
    runs: Vec<RunSummary>,
    cross_solver_diff: Option<f64>,
    exact_error: Option<f64>,
    structure: StructureSummary,
    exponents: ExponentSet,
    contact_tolerance: f64,
    boundary_density: f64,
    probes: Option<ProbeSummary>,
    invariants: Vec<Invariant>,
}

fn exact_field(config: &ScenarioConfig, problem: &ProblemSpec) -> Option<ScalarField> {
    let e = config.data.exact.as_ref()?;
    ScalarField::from_fn(*problem.grid(), |x| e.eval(x)).ok()
}

fn summarize(run: &Run, problem: &ProblemSpec, exact: Option<&ScalarField>, tol: f64) -> (RunSummary, Option<Diagnostics>) {
    let report = match &run.result {
        Ok((_, r)) => Some(r),
        Err(e) => e.report(),
    };
    let diagnostics = run.solution().and_then(|(u, _)| verify_solution(problem, u, tol).ok());
    let summary = RunSummary {
        solver: run.kind,
        converged: report.is_some_and(|r| r.converged),
        iterations: report.map_or(0, |r| r.iterations),
        inner_iterations: report.map_or(0, |r| r.inner_iterations),
        final_residual: report.and_then(SolveReport::final_residual),
        frozen_nodes: report.map_or(0, |r| r.frozen_nodes),
        mollification_identity: report.is_none_or(|r| r.mollification_identity),
        tail_decreasing: report.and_then(|r| r.tail_decreasing),
        limit: report.and_then(|r| r.limit.clone()),
        exact_error: run.solution().zip(exact).and_then(|((u, _), e)| u.max_abs_diff(e).ok()),
        diagnostics: diagnostics.as_ref().map(DiagnosticSummary::from),
        error: run.result.as_ref().err().map(|e| e.to_string()),
    };
    (summary, diagnostics)
}

/// Fraction of a small ball around a boundary corner lying outside a
/// rectangle; recorded as metadata only.
fn boundary_density(dim: usize) -> f64 {
    if dim == 1 {
        0.5
    } else {
        0.75
    }
}

fn default_center(config: &ScenarioConfig) -> Vec<f64> {
    config.output.center.clone().unwrap_or_else(|| {
        config.grid.lower.iter().zip(&config.grid.upper).map(|(a, b)| 0.5 * (a + b)).collect()
    })
}

struct Analysis {
    holder: HolderSummary,
    oscillation: Vec<OscillationRow>,
    table: LongTable,
    contact_tolerance: f64,
    probes: Option<ProbeSummary>,
}

fn analyze(config: &ScenarioConfig, problem: &ProblemSpec, u: &ScalarField, detailed: bool) -> Analysis {
    let grid = problem.grid();
    let h = grid.max_spacing();
    let mut table = LongTable::default();
    let contact_tolerance = config.output.contact_tol.unwrap_or_else(|| default_contact_tolerance(grid, config.solver.tolerance));
    let side = grid.lower().iter().zip(grid.upper()).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let margin = config.output.holder_margin.unwrap_or(0.1 * side);
    let region: Vec<usize> = grid.inner_nodes(margin).into_iter().filter(|&k| !grid.is_boundary(k)).collect();

    let mut holder = HolderSummary { du_reference: problem.exponents().beta2, ..Default::default() };
    if let Ok(fit) = holder_exponent(u, &region) {
        holder.u_exponent = fit.exponent;
        for (i, b) in fit.bins.iter().enumerate() {
            table.push("holder_u", i, "distance", b.distance);
            table.push("holder_u", i, "modulus", b.oscillation);
        }
        table.push_opt("holder_u", 0, "exponent", fit.exponent);
        table.push("holder_u", 0, "fit_residual", fit.fit_residual);
    }
    let partition = coincidence_sets(u, problem.phi(), problem.psi(), contact_tolerance, problem.r0());
    match &partition {
        Ok(p) => {
            let c = p.counts();
            table.push("partition", 0, "lower", c.lower as f64);
            table.push("partition", 0, "upper", c.upper as f64);
            table.push("partition", 0, "pde", c.pde as f64);
            table.push("partition", 0, "tolerance", contact_tolerance);
            if let Ok(g) = gradient_holder(u, problem.phi(), problem.psi(), p, margin, problem.exponents()) {
                holder.du_exponent = g.beta_hat;
                holder.contact_gradient_mismatch = g.contact_mismatch_node.map(|_| g.contact_mismatch);
                for (axis, fit) in g.components.iter().enumerate() {
                    let name = format!("holder_du{}", axis + 1);
                    for (i, b) in fit.bins.iter().enumerate() {
                        table.push(&name, i, "distance", b.distance);
                        table.push(&name, i, "modulus", b.oscillation);
                    }
                    table.push_opt(&name, 0, "exponent", fit.exponent);
                }
                table.push_opt("holder_du", 0, "beta_hat", g.beta_hat);
                table.push_opt("holder_du", 0, "reference", g.reference);
                table.push("holder_du", 0, "contact_mismatch", g.contact_mismatch);
            }
        }
        Err(e) => table.push("partition", 0, &format!("error:{}", e.to_string().replace([',', ' '], "_")), f64::NAN),
    }

    let center = default_center(config);
    let reach = grid.distance_to_boundary(&center);
    let mut oscillation = Vec::new();
    if let Ok(trace) = oscillation_decay(u, problem.f(), &center, &dyadic_radii(0.5 * reach, h), problem.exponents()) {
        for (i, l) in trace.levels.iter().enumerate() {
            oscillation.push(OscillationRow { r: l.r, omega: l.omega, theta: l.theta });
            table.push("oscillation", i, "r", l.r);
            table.push("oscillation", i, "omega", l.omega);
            table.push("oscillation", i, "omega_double", l.omega_double);
            table.push("oscillation", i, "data_term", l.data_term);
            table.push_opt("oscillation", i, "theta", l.theta);
        }
    }

    let probes = detailed.then(|| {
        let r = 0.25 * reach;
        let eps0 = config.output.eps0;
        let exps = problem.exponents();
        let double = grid.ball(&center, 2.0 * r);
        let floor = double.iter().map(|&k| u.get(k)).fold(f64::INFINITY, f64::min);
        let weak_harnack = u.map(|x| x - floor).ok().and_then(|v| harnack_probe(&v, problem.f(), &center, r, eps0, exps).ok());
        let local_max = u.map(|x| x.max(0.0)).ok().and_then(|v| local_max_probe(&v, problem.f(), &center, r, eps0, exps).ok());
        let samples = theta_samples(grid.dim(), DEFAULT_NORM_CAP, 200, config.seed);
        let smallness = continuity_smallness(problem.operator(), grid, grid.nearest_node(&center), r, &samples).ok();
        for (name, p) in [("weak_harnack", &weak_harnack), ("local_max", &local_max)] {
            if let Some(p) = p {
                table.push(name, 0, "r", p.r);
                table.push(name, 0, "numerator", p.numerator);
                table.push(name, 0, "denominator", p.denominator);
                table.push_opt(name, 0, "ratio", p.ratio);
                table.push(name, 0, "tight", if p.tight { 1.0 } else { 0.0 });
            }
        }
        table.push_opt("continuity_smallness", 0, "value", smallness);
        table.push("boundary_density", 0, "value", boundary_density(grid.dim()));
        ProbeSummary { center: center.clone(), r, eps0, weak_harnack, local_max, continuity_smallness: smallness }
    });
    Analysis { holder, oscillation, table, contact_tolerance, probes }
}

fn solve_command(config: &ScenarioConfig, problem: &ProblemSpec, detailed: bool) -> Result<RunArtifacts, RunError> {
    let header = Header::new(config);
    let tol = config.solver.tolerance;
    let runs = execute(problem, &config.solver, config.choice);
    if let Some(e) = hard_error(&runs) {
        return Err(e);
    }
    let exact = exact_field(config, problem);
    let mut invariants = Invariants::default();
    let mut summaries = Vec::new();
    let mut diagnostics = Vec::new();
    for run in &runs {
        let (s, d) = summarize(run, problem, exact.as_ref(), tol);
        if let Some(d) = &d {
            let name = |what: &str| format!("{}.{what}", match run.kind { RunKind::Penalized => "penalized", RunKind::Direct => "direct" });
            invariants.check(name("obstacle_violation"), d.obstacle_violation.value, INVARIANT_FACTOR * tol);
            invariants.check(name("boundary_violation"), d.boundary_violation.value, INVARIANT_FACTOR * tol);
            invariants.check(name("complementarity"), d.complementarity.value, INVARIANT_FACTOR * tol);
        }
        summaries.push(s);
        diagnostics.push(d);
    }
    let solved: Vec<(&ScalarField, &SolveReport)> = runs.iter().filter_map(Run::solution).collect();
    let cross_solver_diff = match solved.as_slice() {
        [a, b] => Some(a.0.max_abs_diff(b.0)?),
        _ => None,
    };
    if let Some(d) = cross_solver_diff {
        invariants.check("cross_solver_diff", d, CROSS_SOLVER_LIMIT);
    }
    let structure = check_structure_condition(
        problem.operator(),
        problem.lambda(),
        problem.big_lambda(),
        problem.mu(),
        STRUCTURE_SAMPLES,
        config.seed,
    )?;
    invariants.check("structure_condition", structure.max_violation.max(0.0), 0.0);

    let primary = runs.iter().rev().find(|r| r.solution().is_some());
    let continuation = runs.iter().find(|r| r.kind == RunKind::Penalized).and_then(Run::solution).map(|(_, r)| r);
    let analysis = primary.and_then(Run::solution).map(|(u, _)| analyze(config, problem, u, detailed));
    let max_of = |f: fn(&Diagnostics) -> f64| diagnostics.iter().flatten().map(f).reduce(f64::max);
    let non_converged: Vec<String> = runs.iter().filter_map(|r| r.result.as_ref().err().map(|e| e.to_string())).collect();

    let report = SolveReportFile {
        header: header.clone(),
        command: if detailed { "analyze" } else { "solve" },
        residual_history: primary.and_then(Run::solution).map(|(_, r)| r.residual_history.clone()).unwrap_or_default(),
        delta_path: continuation.map(|r| r.delta_path.clone()).unwrap_or_default(),
        penalty_trace: continuation.map(|r| r.penalty_trace.clone()).unwrap_or_default(),
        regime_counts: primary.and_then(Run::solution).map(|(_, r)| r.regime_counts),
        constraint_violation_max: max_of(|d| d.obstacle_violation.value),
        complementarity_max: max_of(|d| d.complementarity.value),
        holder: analysis.as_ref().map(|a| a.holder.clone()).unwrap_or_default(),
        oscillation: analysis.as_ref().map(|a| a.oscillation.clone()).unwrap_or_default(),
        primary: primary.map(|r| r.kind),
        runs: summaries,
        cross_solver_diff,
        exact_error: primary.and_then(Run::solution).zip(exact.as_ref()).and_then(|((u, _), e)| u.max_abs_diff(e).ok()),
        structure: StructureSummary {
            samples: structure.samples,
            seed: config.seed,
            max_violation: structure.max_violation,
            passed: structure.passed(),
        },
        exponents: *problem.exponents(),
        contact_tolerance: analysis.as_ref().map_or(0.0, |a| a.contact_tolerance),
        boundary_density: boundary_density(problem.grid().dim()),
        probes: analysis.as_ref().and_then(|a| a.probes.clone()),
        invariants: invariants.0.clone(),
    };

    let mut artifacts = Vec::new();
    if let Some((u, r)) = primary.and_then(Run::solution) {
        artifacts.push(Artifact { name: "solution.csv".into(), contents: solution_csv(&header, problem, u, &r.regimes) });
    }
    artifacts.push(Artifact { name: "report.json".into(), contents: to_json(&report) });
    if detailed {
        if let Some(a) = &analysis {
            artifacts.push(Artifact { name: "analysis.csv".into(), contents: a.table.render(&header) });
        }
    }
    let outcome = if non_converged.is_empty() { invariants.outcome() } else { Outcome::NonConvergence(non_converged.join("; ")) };
    Ok(RunArtifacts { artifacts, outcome })
}

#[derive(Debug, Serialize)]
struct VerifyFile {
    header: Header,
    source_header: String,
    config_matches: bool,
    diagnostics: DiagnosticSummary,
    exact_error: Option<f64>,
    invariants: Vec<Invariant>,
}

fn verify_command(config: &ScenarioConfig, problem: &ProblemSpec) -> Result<RunArtifacts, RunError> {
    let dir = config.output.dir.as_ref().ok_or(RunError::NoSolution)?;
    let path = Path::new(dir).join("solution.csv");
    let text = fs::read_to_string(&path).map_err(|source| ArtifactError::Io { path: path.clone(), source })?;
    verify_text(config, problem, &text)
}

/// Verifies the contents of a solution file against `config`.
pub fn verify_solution_file(config: &ScenarioConfig, text: &str) -> Result<RunArtifacts, RunError> {
    verify_text(config, &config.build_problem()?, text)
}

fn verify_text(config: &ScenarioConfig, problem: &ProblemSpec, text: &str) -> Result<RunArtifacts, RunError> {
    let header = Header::new(config);
    let table = read_solution_csv(text)?;
    let u = table.field_on(problem.grid())?;
    let tol = config.solver.tolerance;
    let d = verify_solution(problem, &u, tol)?;
    let mut invariants = Invariants::default();
    let config_matches = table.header.contains(&format!("config={}", header.config_sha256));
    invariants.require("config_hash", config_matches);
    invariants.check("obstacle_violation", d.obstacle_violation.value, INVARIANT_FACTOR * tol);
    invariants.check("boundary_violation", d.boundary_violation.value, INVARIANT_FACTOR * tol);
    invariants.check("complementarity", d.complementarity.value, INVARIANT_FACTOR * tol);
    let file = VerifyFile {
        header: header.clone(),
        source_header: table.header.clone(),
        config_matches,
        diagnostics: DiagnosticSummary::from(&d),
        exact_error: exact_field(config, problem).and_then(|e| u.max_abs_diff(&e).ok()),
        invariants: invariants.0.clone(),
    };
    Ok(RunArtifacts { artifacts: vec![Artifact { name: "verify.json".into(), contents: to_json(&file) }], outcome: invariants.outcome() })
}

fn single_solver(choice: SolverChoice) -> SolverChoice {
    match choice {
        SolverChoice::Both => SolverChoice::Direct,
        c => c,
    }
}

#[derive(Debug, Clone, Serialize)]
struct SweepLevel {
    nodes: usize,
    h: f64,
    error: Option<f64>,
    order: Option<f64>,
    flag: &'static str,
}

fn sweep_h(config: &ScenarioConfig) -> Result<RunArtifacts, RunError> {
    let header = Header::new(config);
    let n = config.grid.nodes.iter().copied().min().unwrap_or(2);
    let sizes = [n, 2 * n - 1, 4 * n - 3];
    let choice = single_solver(config.choice);
    let results: Vec<_> = sizes
        .par_iter()
        .map(|&nodes| {
            let c = config.with_nodes(nodes);
            let problem = c.build_problem()?;
            let run = execute(&problem, &c.solver, choice).pop().expect("one run");
            Ok::<_, RunError>((c, problem, run))
        })
        .collect::<Result<_, _>>()?;
    let runs: Vec<&Run> = results.iter().map(|(_, _, r)| r).collect();
    if let Some(e) = runs.iter().find_map(|r| match &r.result {
        Err(SolveError::NonConvergence { .. } | SolveError::PolicyCycle { .. }) | Ok(_) => None,
        Err(e) => Some(RunError::Solve(clone_error(e))),
    }) {
        return Err(e);
    }
    let failures: Vec<String> = results.iter().filter_map(|(_, _, r)| r.result.as_ref().err().map(|e| e.to_string())).collect();
    let mut invariants = Invariants::default();
    let mut errors = Vec::new();
    let finest = results.last().and_then(|(_, _, r)| r.solution()).map(|(u, _)| u.clone());
    for (i, (c, problem, run)) in results.iter().enumerate() {
        let Some((u, _)) = run.solution() else {
            errors.push(None);
            continue;
        };
        let d = verify_solution(problem, u, c.solver.tolerance)?;
        invariants.check(format!("nodes_{}.complementarity", sizes[i]), d.complementarity.value, INVARIANT_FACTOR * c.solver.tolerance);
        invariants.check(format!("nodes_{}.obstacle_violation", sizes[i]), d.obstacle_violation.value, INVARIANT_FACTOR * c.solver.tolerance);
        let error = match exact_field(c, problem) {
            Some(e) => Some(u.max_abs_diff(&e)?),
            None if i + 1 < sizes.len() => finest.as_ref().map(|f| restricted_diff(u, f, sizes[i], sizes[2])),
            None => None,
        };
        errors.push(error);
    }
    let mut levels = Vec::new();
    for (i, &nodes) in sizes.iter().enumerate() {
        let h = results[i].1.grid().max_spacing();
        let error = errors[i];
        let previous = if i > 0 { errors[i - 1] } else { None };
        let (order, flag) = match (previous, error) {
            (_, None) => (None, "reference"),
            (Some(p), Some(e)) if p <= EXACT_LEVEL && e <= EXACT_LEVEL => (None, "exact"),
            (Some(p), Some(e)) if e > 0.0 => (Some((p / e).log2()), "measured"),
            (None, Some(e)) if e <= EXACT_LEVEL => (None, "exact"),
            _ => (None, "measured"),
        };
        levels.push(SweepLevel { nodes, h, error, order, flag });
    }
    let mut csv = header.comment();
    csv.push_str("\nnodes,h,error,order,flag\n");
    for l in &levels {
        let fmt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.16e}"));
        csv.push_str(&format!("{},{:.16e},{},{},{}\n", l.nodes, l.h, fmt(l.error), fmt(l.order), l.flag));
    }
    #[derive(Serialize)]
    struct SweepFile<'a> {
        header: &'a Header,
        reference: &'static str,
        levels: &'a [SweepLevel],
        invariants: &'a [Invariant],
    }
    let reference = if config.data.exact.is_some() { "closed_form" } else { "finest_grid" };
    let report = SweepFile { header: &header, reference, levels: &levels, invariants: &invariants.0 };
    let outcome = if failures.is_empty() { invariants.outcome() } else { Outcome::NonConvergence(failures.join("; ")) };
    Ok(RunArtifacts {
        artifacts: vec![
            Artifact { name: "sweep_h.csv".into(), contents: csv },
            Artifact { name: "sweep_h.json".into(), contents: to_json(&report) },
        ],
        outcome,
    })
}

/// `max |u - fine|` over the nodes of `u`'s grid, which are nested in the
/// finer grid.
fn restricted_diff(u: &ScalarField, fine: &ScalarField, coarse_nodes: usize, fine_nodes: usize) -> f64 {
    let ratio = (fine_nodes - 1) / (coarse_nodes - 1);
    let grid = u.grid();
    let fg = fine.grid();
    (0..grid.len())
        .map(|k| {
            let [i, j] = grid.multi_index(k);
            let l = fg.index([i * ratio, if grid.dim() == 2 { j * ratio } else { 0 }]);
            (u.get(k) - fine.get(l)).abs()
        })
        .fold(0.0, f64::max)
}

fn sweep_delta(config: &ScenarioConfig, problem: &ProblemSpec) -> Result<RunArtifacts, RunError> {
    let header = Header::new(config);
    let result = continuation_solve(problem, &config.solver);
    let (u, report) = match result {
        Ok(v) => v,
        Err(e @ (SolveError::NonConvergence { .. } | SolveError::PolicyCycle { .. })) => {
            let message = e.to_string();
            let report = e.report().cloned();
            let path = report.as_ref().map(|r| r.delta_path.clone()).unwrap_or_default();
            let mut csv = header.comment();
            csv.push_str("\ndelta,tail,penalty_bound,iterations,residual\n");
            csv.push_str(&delta_rows(&path));
            return Ok(RunArtifacts {
                artifacts: vec![Artifact { name: "sweep_delta.csv".into(), contents: csv }],
                outcome: Outcome::NonConvergence(message),
            });
        }
        Err(e) => return Err(RunError::Solve(e)),
    };
    let d = verify_solution(problem, &u, config.solver.tolerance)?;
    let mut invariants = Invariants::default();
    invariants.check("complementarity", d.complementarity.value, INVARIANT_FACTOR * config.solver.tolerance);
    invariants.check("obstacle_violation", d.obstacle_violation.value, INVARIANT_FACTOR * config.solver.tolerance);
    let bounds: Vec<f64> = report.penalty_trace.iter().copied().filter(|b| *b > 0.0).collect();
    let spread = bounds.iter().copied().fold(0.0, f64::max) / bounds.iter().copied().fold(f64::INFINITY, f64::min);

    let mut csv = header.comment();
    csv.push_str("\ndelta,tail,penalty_bound,iterations,residual\n");
    csv.push_str(&delta_rows(&report.delta_path));
    #[derive(Serialize)]
    struct DeltaFile<'a> {
        header: &'a Header,
        schedule: DeltaSchedule,
        delta_path: &'a [DeltaStep],
        penalty_trace: &'a [f64],
        penalty_bound_spread: Option<f64>,
        tail_decreasing: Option<bool>,
        limit: &'a Option<LimitStep>,
        invariants: &'a [Invariant],
    }
    let file = DeltaFile {
        header: &header,
        schedule: config.solver.delta_schedule,
        delta_path: &report.delta_path,
        penalty_trace: &report.penalty_trace,
        penalty_bound_spread: spread.is_finite().then_some(spread),
        tail_decreasing: report.tail_decreasing,
        limit: &report.limit,
        invariants: &invariants.0,
    };
    Ok(RunArtifacts {
        artifacts: vec![
            Artifact { name: "sweep_delta.csv".into(), contents: csv },
            Artifact { name: "sweep_delta.json".into(), contents: to_json(&file) },
        ],
        outcome: invariants.outcome(),
    })
}

fn delta_rows(path: &[DeltaStep]) -> String {
    path.iter()
        .map(|s| {
            let tail = s.tail.map_or_else(String::new, |t| format!("{t:.16e}"));
            format!("{:.16e},{tail},{:.16e},{},{:.16e}\n", s.delta, s.penalty_bound, s.iterations, s.residual)
        })
        .collect()
}

/// Summary of the min-max identity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub draws: usize,
    pub tied_draws: usize,
    /// Draws where the reduction differs from `min(max(a, b), c)`.
    pub closed_form_mismatches: usize,
    /// Draws where the reduction differs from the 21 x 21 grid oracle by more than `1e-12`.
    pub grid_mismatches: usize,
    /// Draws where the returned `(alpha, beta)` do not attain the value.
    pub policy_mismatches: usize,
    pub max_grid_difference: f64,
    pub regime_counts: RegimeCounts,
}

/// `min over alpha max over beta` of the bilinear game on a uniform grid.
pub fn grid_oracle(a: f64, b: f64, c: f64, steps: usize) -> f64 {
    let t = |i: usize| i as f64 / steps as f64;
    (0..=steps)
        .map(|i| {
            let alpha = t(i);
            (0..=steps)
                .map(|j| {
                    let beta = t(j);
                    alpha * beta * a + alpha * (1.0 - beta) * b + (1.0 - alpha) * c
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Draws triples from a seeded generator, a quarter of them with ties, and
/// compares the reduction with both oracles.
pub fn identity_summary(draws: usize, seed: u64) -> IdentitySummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = IdentitySummary {
        draws,
        tied_draws: 0,
        closed_form_mismatches: 0,
        grid_mismatches: 0,
        policy_mismatches: 0,
        max_grid_difference: 0.0,
        regime_counts: RegimeCounts::default(),
    };
    let mut labels = Vec::with_capacity(draws);
    for _ in 0..draws {
        let mut v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if rng.gen_bool(0.25) {
            let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
            v[j] = v[i];
            s.tied_draws += 1;
        }
        let [a, b, c] = v;
        let m = minmax_reduction(a, b, c);
        if m.value != a.max(b).min(c) {
            s.closed_form_mismatches += 1;
        }
        let diff = (m.value - grid_oracle(a, b, c, 20)).abs();
        s.max_grid_difference = s.max_grid_difference.max(diff);
        if diff > 1e-12 {
            s.grid_mismatches += 1;
        }
        let (al, be) = (m.alpha as f64, m.beta as f64);
        if al * be * a + al * (1.0 - be) * b + (1.0 - al) * c != m.value {
            s.policy_mismatches += 1;
        }
        labels.push(Some(m.regime()));
    }
    s.regime_counts = RegimeCounts::from_labels(&labels);
    s
}

fn identity_test(config: &ScenarioConfig) -> RunArtifacts {
    let header = Header::new(config);
    let summary = identity_summary(IDENTITY_DRAWS, config.seed);
    let mut invariants = Invariants::default();
    invariants.check("closed_form_mismatches", summary.closed_form_mismatches as f64, 0.0);
    invariants.check("grid_mismatches", summary.grid_mismatches as f64, 0.0);
    invariants.check("policy_mismatches", summary.policy_mismatches as f64, 0.0);
    #[derive(Serialize)]
    struct IdentityFile<'a> {
        header: &'a Header,
        summary: &'a IdentitySummary,
        invariants: &'a [Invariant],
    }
    let contents = to_json(&IdentityFile { header: &header, summary: &summary, invariants: &invariants.0 });
    RunArtifacts { artifacts: vec![Artifact { name: "identity.json".into(), contents }], outcome: invariants.outcome() }
}
