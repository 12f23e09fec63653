use std::fs;
use std::path::Path;
use std::process::Command as Process;

use obstacle::scenario::{
    builtin_names, config_hash, identity_summary, parse_config, read_solution_csv, run_scenario, verify_solution_file,
    Command, Outcome, ScenarioConfig, SolverChoice,
};
use obstacle::solvers::solve_complementarity;
use proptest::prelude::*;

const BIN: &str = env!("CARGO_BIN_EXE_obstacle");

fn small(name: &str, nodes: usize) -> ScenarioConfig {
    parse_config(name).unwrap().with_nodes(nodes)
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn numeric_fields_survive_serialization(
        lambda in 0.05..3.0f64,
        ratio in 1.0..5.0f64,
        nodes in 3usize..400,
        seed in any::<u64>(),
        tolerance in 1e-14..1e-3f64,
        beta1 in 0.01..0.99f64,
        center in -0.9..0.9f64,
        delta0 in 1e-4..1.0f64,
        mu in 0.0..4.0f64,
    ) {
        let text = format!(
            "name = prop\nseed = {seed}\n[grid]\nlower = -1\nupper = 1\nnodes = {nodes}\n\
             [operator]\nfamily = pucci_plus\nlambda = {lambda}\nbig_lambda = {}\nmu = {mu}\n\
             [data]\nf = sin(3*x1)\nphi = -1\npsi = 1 + x1^2\ng = 0\nbeta1 = {beta1}\n\
             [solver]\ntolerance = {tolerance}\ndelta0 = {delta0}\ndelta_floor = {}\n\
             [output]\ncenter = {center}\n",
            lambda * ratio,
            delta0 * 1e-3,
        );
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(c.operator.lambda, lambda);
        prop_assert_eq!(c.solver.tolerance, tolerance);
        prop_assert_eq!(c.seed, seed);
        let again = parse_config(&c.serialize()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(again.serialize(), c.serialize());
        prop_assert_eq!(config_hash(&again), config_hash(&c));
    }
}

#[test]
fn ellipticity_violation_names_the_key() {
    let base = "scenario = poisson_no_contact\n[operator]\nfamily = pucci_plus\nlambda = 2\nbig_lambda = 1\n";
    let e = parse_config(base).unwrap_err();
    assert_eq!(e.key, "operator.lambda");
    assert_eq!(e.line, Some(4));
}

#[test]
fn unknown_sections_and_keys_are_errors() {
    let e = parse_config("scenario = poisson_no_contact\n[plot]\ncolor = red\n").unwrap_err();
    assert_eq!((e.line, e.message.as_str()), (Some(2), "unknown section"));
    let e = parse_config("scenario = poisson_no_contact\n[solver]\nsmoother = jacobi\n").unwrap_err();
    assert_eq!(e.key, "solver.smoother");
    assert_eq!(e.line, Some(3));
    assert!(parse_config("scenario = poisson_no_contact\n[grid]\nnodes = many\n").is_err());
}

#[test]
fn solution_file_reproduces_the_solver_output() {
    let mut c = small("bilateral_clip_1d", 129);
    c.choice = SolverChoice::Direct;
    let run = run_scenario(&c, Command::Solve).unwrap();
    assert_eq!(run.outcome, Outcome::Success);
    let table = read_solution_csv(run.get("solution.csv").unwrap()).unwrap();
    let problem = c.build_problem().unwrap();
    let (u, report) = solve_complementarity(&problem, &c.solver).unwrap();
    let read = table.field_on(problem.grid()).unwrap();
    assert!(read.values().iter().zip(u.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(table.regimes, report.regimes);
    assert_eq!(table.phi, problem.phi().values());
}

#[test]
fn every_artifact_carries_version_and_config_hash() {
    let c = small("bilateral_clip_1d", 65);
    let hash = config_hash(&c);
    let header = format!("config={hash}");
    for command in [Command::Solve, Command::Analyze, Command::SweepDelta, Command::IdentityTest] {
        let run = run_scenario(&c, command).unwrap();
        assert!(!run.artifacts.is_empty());
        for a in &run.artifacts {
            if a.name.ends_with(".csv") {
                let first = a.contents.lines().next().unwrap();
                assert!(first.starts_with(&format!("# obstacle {}", env!("CARGO_PKG_VERSION"))), "{}", a.name);
                assert!(first.contains(&header), "{}", a.name);
            } else {
                let v = json(&a.contents);
                assert_eq!(v["header"]["config_sha256"], hash.as_str(), "{}", a.name);
                assert_eq!(v["header"]["version"], env!("CARGO_PKG_VERSION"), "{}", a.name);
            }
        }
    }
}

#[test]
fn output_directory_does_not_change_the_hash() {
    let mut a = small("poisson_no_contact", 33);
    let mut b = a.clone();
    a.output.dir = Some("one".into());
    b.output.dir = Some("two".into());
    assert_eq!(config_hash(&a), config_hash(&b));
    b.seed += 1;
    assert_ne!(config_hash(&a), config_hash(&b));
}

#[test]
fn repeated_runs_produce_identical_bytes() {
    for name in ["pucci_2d_bilateral", "rough_f_1d"] {
        let c = parse_config(name).unwrap();
        let c = if c.dim() == 2 { c.with_nodes(33) } else { c };
        let a = run_scenario(&c, Command::Analyze).unwrap();
        let b = run_scenario(&c, Command::Analyze).unwrap();
        assert_eq!(a.artifacts, b.artifacts, "{name}");
    }
}

#[test]
fn written_solution_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small("example_1d_unilateral", 257);
    c.output.dir = Some(dir.path().display().to_string());
    run_scenario(&c, Command::Solve).unwrap().write(dir.path()).unwrap();
    let verified = run_scenario(&c, Command::Verify).unwrap();
    assert_eq!(verified.outcome, Outcome::Success);
    let report = json(verified.get("verify.json").unwrap());
    assert_eq!(report["config_matches"], true);

    let text = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[100].split(',').map(String::from).collect();
    cols[1] = format!("{:.16e}", cols[2].parse::<f64>().unwrap() - 0.5);
    lines[100] = cols.join(",");
    let tampered = verify_solution_file(&c, &(lines.join("\n") + "\n")).unwrap();
    match tampered.outcome {
        Outcome::InvariantFailure(names) => assert!(names.iter().any(|n| n == "obstacle_violation")),
        other => panic!("tampered file passed: {other:?}"),
    }
}

#[test]
fn verify_rejects_a_file_for_another_grid() {
    let c = small("poisson_no_contact", 65);
    let run = run_scenario(&c, Command::Solve).unwrap();
    let other = small("poisson_no_contact", 33);
    assert!(verify_solution_file(&other, run.get("solution.csv").unwrap()).is_err());
}

#[test]
fn identity_test_finds_no_mismatch() {
    let s = identity_summary(20_000, 9);
    assert_eq!(s.draws, 20_000);
    assert_eq!(s.closed_form_mismatches, 0);
    assert_eq!(s.grid_mismatches, 0);
    assert_eq!(s.policy_mismatches, 0);
    assert!(s.tied_draws > 0);
    let run = run_scenario(&small("poisson_no_contact", 33), Command::IdentityTest).unwrap();
    assert_eq!(run.outcome, Outcome::Success);
    assert_eq!(json(run.get("identity.json").unwrap())["summary"]["closed_form_mismatches"], 0);
}

#[test]
fn grid_sweep_on_poisson_is_exact() {
    let c = parse_config("poisson_no_contact").unwrap();
    let run = run_scenario(&c, Command::SweepH).unwrap();
    assert_eq!(run.outcome, Outcome::Success);
    let csv = run.get("sweep_h.csv").unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    for (row, nodes) in rows.iter().zip([2049, 4097, 8193]) {
        assert!(row.starts_with(&format!("{nodes},")), "{row}");
        assert!(row.ends_with(",exact"), "{row}");
    }
}

#[test]
fn builtins_solve_cleanly() {
    for name in builtin_names() {
        let c = parse_config(name).unwrap();
        let c = if c.dim() == 2 { c.with_nodes(17) } else { c.with_nodes(129) };
        let run = run_scenario(&c, Command::Solve).unwrap();
        assert_eq!(run.outcome, Outcome::Success, "{name}");
        let report = json(run.get("report.json").unwrap());
        assert!(report["constraint_violation_max"].as_f64().unwrap() <= 1e-9, "{name}");
    }
}

fn cli(args: &[&str], cwd: &Path) -> (i32, String) {
    let out = Process::new(BIN).args(args).current_dir(cwd).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let out = root.join("run");
    let out_arg = out.to_str().unwrap();

    let config = root.join("clip.toml");
    fs::write(&config, "scenario = bilateral_clip_1d\n[grid]\nnodes = 65\n").unwrap();
    let config_arg = config.to_str().unwrap();
    assert_eq!(cli(&["solve", "--config", config_arg, "--out", out_arg, "--solver", "direct"], root).0, 0);
    assert!(out.join("solution.csv").exists());
    assert!(out.join("report.json").exists());
    assert_eq!(cli(&["verify", "--config", config_arg, "--out", out_arg], root).0, 2);
    assert_eq!(cli(&["verify", "--config", config_arg, "--out", out_arg, "--solver", "direct"], root).0, 0);

    let solution = out.join("solution.csv");
    let text = fs::read_to_string(&solution).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[30].split(',').map(String::from).collect();
    cols[1] = "5.0".into();
    lines[30] = cols.join(",");
    fs::write(&solution, lines.join("\n") + "\n").unwrap();
    assert_eq!(cli(&["verify", "--config", config_arg, "--out", out_arg], root).0, 2);

    let stuck = root.join("stuck.toml");
    fs::write(&stuck, "scenario = bilateral_clip_1d\n[grid]\nnodes = 65\n[solver]\nmax_iterations = 1\n").unwrap();
    let (code, stderr) = cli(&["solve", "--config", stuck.to_str().unwrap(), "--out", out_arg], root);
    assert_eq!(code, 3, "{stderr}");

    let broken = root.join("broken.toml");
    fs::write(&broken, "[grid]\nlower = 0\nupper = 1\nnodes = 9\n[operator]\nlambda = 2\nbig_lambda = 1\n").unwrap();
    let (code, stderr) = cli(&["solve", "--config", broken.to_str().unwrap()], root);
    assert_eq!(code, 1);
    assert!(stderr.contains("operator.lambda"), "{stderr}");
    assert_eq!(cli(&["solve", "--config", "missing.toml"], root).0, 1);
    assert_eq!(cli(&["solve"], root).0, 1);
    assert_eq!(cli(&["identity-test", "--config", "poisson_no_contact", "--out", out_arg, "--seed", "4"], root).0, 0);
}
