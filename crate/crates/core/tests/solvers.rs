use obstacle::discretize::assemble_residual;
use obstacle::operators::{check_structure_condition, OperatorSpec};
use obstacle::problem::{ProblemData, ProblemSpec};
use obstacle::scenario::parse_config;
use obstacle::solvers::{
    continuation_solve, solve_complementarity, solve_penalized, verify_solution, DeltaSchedule, SolveError, SolverConfig,
};
use obstacle::{compute_exponents, Error, Grid, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sup(a: &ScalarField, b: &ScalarField) -> f64 {
    a.max_abs_diff(b).unwrap()
}

fn problem(grid: Grid, operator: OperatorSpec, f: ScalarField, phi: ScalarField, psi: ScalarField) -> ProblemSpec {
    let g = ScalarField::new(grid, phi.values().iter().zip(psi.values()).map(|(l, h)| 0.0f64.clamp(*l, *h)).collect())
        .unwrap();
    ProblemSpec::new(ProblemData {
        grid,
        operator,
        f,
        phi,
        psi,
        g,
        exponents: compute_exponents(grid.dim(), 3.0, 3.0, 0.5).unwrap(),
        r0: None,
    })
    .unwrap()
}

fn random_grid(rng: &mut ChaCha8Rng) -> Grid {
    if rng.gen_bool(0.3) {
        Grid::square(-1.0, 1.0, 17).unwrap()
    } else {
        Grid::interval(-1.0, 1.0, 65).unwrap()
    }
}

fn random_operator(rng: &mut ChaCha8Rng, dim: usize) -> OperatorSpec {
    if rng.gen_bool(0.5) {
        OperatorSpec::laplacian(dim)
    } else {
        let l = rng.gen_range(0.3..1.0);
        OperatorSpec::pucci_plus(dim, l, l * rng.gen_range(1.0..3.0), rng.gen_range(0.0..2.0)).unwrap()
    }
}

/// Smooth random bump `c + a sin(w x1 + s) cos(w' x2)`.
fn random_bump(rng: &mut ChaCha8Rng, grid: Grid, level: f64) -> ScalarField {
    let (a, w, s, w2) = (rng.gen_range(0.1..0.5), rng.gen_range(1.0..6.0), rng.gen_range(0.0..6.0), rng.gen_range(0.0..3.0));
    let dim = grid.dim();
    ScalarField::from_fn(grid, |x| {
        let y = if dim == 2 { (w2 * x[1]).cos() } else { 1.0 };
        level + a * (w * x[0] + s).sin() * y - 0.3 * x[0] * x[0]
    })
    .unwrap()
}

#[test]
fn one_sided_policy_steps_never_increase_violation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut with_contact = 0;
    for trial in 0..60 {
        let grid = random_grid(&mut rng);
        let op = random_operator(&mut rng, grid.dim());
        let lower = trial % 2 == 0;
        let bump = random_bump(&mut rng, grid, 0.3);
        let far = |c: f64| ScalarField::constant(grid, c).unwrap();
        let push = rng.gen_range(0.5..4.0);
        let p = if lower {
            problem(grid, op, far(-push), bump, far(1e3))
        } else {
            problem(grid, op, far(push), far(-1e3), bump.scaled(-1.0).unwrap())
        };
        let (u, report) = solve_complementarity(&p, &SolverConfig::default()).unwrap();
        if report.regime_counts.lower + report.regime_counts.upper > 0 {
            with_contact += 1;
        }
        let v = &report.violation_history;
        assert_eq!(v.len(), report.iterations);
        for w in v.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "trial {trial}: violation rose {w:?}");
        }
        assert!(verify_solution(&p, &u, 1e-9).unwrap().passed(), "trial {trial}");
    }
    assert!(with_contact >= 40, "only {with_contact} instances touched the obstacle");
}

#[test]
fn fixed_policy_solves_obey_comparison() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let grid = random_grid(&mut rng);
        let op = random_operator(&mut rng, grid.dim());
        let f1 = random_bump(&mut rng, grid, 0.0);
        let lift = random_bump(&mut rng, grid, 1.0).map(|v| v.abs()).unwrap();
        let f2 = ScalarField::new(grid, f1.values().iter().zip(lift.values()).map(|(a, b)| a + b).collect()).unwrap();
        let wide = |c: f64| ScalarField::constant(grid, c).unwrap();
        let p1 = problem(grid, op.clone(), f1, wide(-1e3), wide(1e3));
        let p2 = problem(grid, op, f2, wide(-1e3), wide(1e3));
        let (u1, r1) = solve_complementarity(&p1, &SolverConfig::default()).unwrap();
        let (u2, _) = solve_complementarity(&p2, &SolverConfig::default()).unwrap();
        assert_eq!(r1.regime_counts.lower + r1.regime_counts.upper, 0);
        for k in 0..grid.len() {
            assert!(u1.get(k) <= u2.get(k) + 1e-9, "node {k}");
        }
    }
}

#[test]
fn random_bilateral_instances_agree_across_solvers() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut both_sides = 0;
    for trial in 0..24 {
        let grid = random_grid(&mut rng);
        let op = random_operator(&mut rng, grid.dim());
        let phi = random_bump(&mut rng, grid, -0.2);
        let hi = random_bump(&mut rng, grid, 0.2);
        let psi = ScalarField::new(grid, hi.values().iter().zip(phi.values()).map(|(h, l)| h.max(l + 0.05)).collect())
            .unwrap();
        let f = ScalarField::constant(grid, rng.gen_range(-6.0..6.0)).unwrap();
        let p = problem(grid, op, f, phi.clone(), psi.clone());
        let config = SolverConfig::default();
        let (direct, report) = solve_complementarity(&p, &config).unwrap();
        let (penalized, _) = continuation_solve(&p, &config).unwrap();
        let d = verify_solution(&p, &direct, config.tolerance).unwrap();
        assert!(d.within(10.0), "trial {trial}: {d:?}");
        for k in 0..grid.len() {
            assert!(phi.get(k) - 1e-9 <= direct.get(k) && direct.get(k) <= psi.get(k) + 1e-9);
        }
        assert!(sup(&direct, &penalized) <= 1e-6, "trial {trial}: {}", sup(&direct, &penalized));
        if report.regime_counts.lower > 0 && report.regime_counts.upper > 0 {
            both_sides += 1;
        }
    }
    assert!(both_sides >= 3, "only {both_sides} instances touched both obstacles");
}

#[test]
fn penalized_solve_without_contact_is_the_unconstrained_solve() {
    let c = parse_config("poisson_no_contact").unwrap().with_nodes(257);
    let p = c.build_problem().unwrap();
    let exact = ScalarField::from_fn(*p.grid(), |x| 1.0 - x[0] * x[0]).unwrap();
    for delta in [1e-2, 1e-4, 1e-6] {
        let (u, report) = solve_penalized(&p, 0.0, delta, None, &SolverConfig::default()).unwrap();
        assert!(sup(&u, &exact) <= 1e-9);
        assert!(report.penalty_trace.iter().all(|&b| b == 0.0));
        for k in p.grid().boundary_nodes() {
            assert_eq!(u.get(k), p.g().get(k));
        }
    }
}

#[test]
fn penalized_solve_approaches_the_obstacle_fixture() {
    let (_, p) = builtin("example_1d_unilateral");
    let phi = p.phi().clone();
    let (u, report) = solve_penalized(&p, 0.0, 1e-6, None, &SolverConfig::default()).unwrap();
    assert!(report.converged);
    assert!(sup(&u, &phi) <= 1e-2, "{}", sup(&u, &phi));
}

#[test]
fn continuation_tail_decreases_on_the_fixture() {
    let (_, p) = builtin("example_1d_unilateral");
    let (u, report) = continuation_solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(report.tail_decreasing, Some(true));
    let tails: Vec<f64> = report.delta_path.iter().filter_map(|s| s.tail).collect();
    assert!(*tails.last().unwrap() <= 1e-4);
    assert!(report.delta_path.iter().all(|s| s.penalty_bound.is_finite()));
    let (direct, _) = solve_complementarity(&p, &SolverConfig::default()).unwrap();
    assert!(sup(&u, &direct) <= 1e-9);
}

#[test]
fn continuation_tail_vanishes_without_contact() {
    let c = parse_config("poisson_no_contact").unwrap().with_nodes(129);
    let p = c.build_problem().unwrap();
    let (_, report) = continuation_solve(&p, &SolverConfig::default()).unwrap();
    assert!(report.delta_path[0].tail.is_none());
    assert!(report.delta_path[1..].iter().all(|s| s.tail.unwrap() <= 1e-12));
}

#[test]
fn invalid_configurations_are_rejected() {
    let (_, p) = builtin("bilateral_clip_1d");
    let base = SolverConfig::default();
    let bad = [
        SolverConfig { tolerance: 0.0, ..base },
        SolverConfig { max_iterations: 0, ..base },
        SolverConfig { damping: 1.5, ..base },
        SolverConfig { epsilon: -1.0, ..base },
        SolverConfig { delta_schedule: DeltaSchedule { initial: 1e-6, factor: 0.5, floor: 1e-2 }, ..base },
        SolverConfig { delta_schedule: DeltaSchedule { initial: 1e-2, factor: 1.0, floor: 1e-6 }, ..base },
    ];
    for config in bad {
        assert!(matches!(solve_complementarity(&p, &config), Err(SolveError::Config(_))));
        assert!(matches!(continuation_solve(&p, &config), Err(SolveError::Config(_))));
    }
}

#[test]
fn iteration_cap_reports_non_convergence_with_history() {
    let (_, p) = builtin("bilateral_clip_1d");
    let config = SolverConfig { max_iterations: 2, ..SolverConfig::default() };
    match solve_complementarity(&p, &config) {
        Err(e @ (SolveError::NonConvergence { .. } | SolveError::PolicyCycle { .. })) => {
            let report = e.report().unwrap();
            assert!(!report.converged);
            assert_eq!(report.residual_history.len(), 2);
            assert!(report.final_residual().unwrap() > config.tolerance);
        }
        other => panic!("expected a convergence failure, got {other:?}"),
    }
}

#[test]
fn custom_operators_are_refused_by_both_solvers() {
    let grid = Grid::interval(-1.0, 1.0, 33).unwrap();
    let mut op = OperatorSpec::custom(1, 1.0, 1.0, 0.0, |_, _, m| -m.trace()).unwrap();
    let mu = ScalarField::constant(grid, 0.0).unwrap();
    let check = check_structure_condition(&op, 1.0, 1.0, &mu, 500, 1).unwrap();
    assert!(op.certify(&check));
    let wide = |c: f64| ScalarField::constant(grid, c).unwrap();
    let p = problem(grid, op, wide(1.0), wide(-1.0), wide(1.0));
    let config = SolverConfig::default();
    assert!(matches!(solve_complementarity(&p, &config), Err(SolveError::Input(Error::CustomOperator))));
    assert!(matches!(continuation_solve(&p, &config), Err(SolveError::Input(Error::CustomOperator))));
    assert!(matches!(solve_penalized(&p, 0.0, 1e-3, None, &config), Err(SolveError::Input(Error::CustomOperator))));
}

#[test]
fn planted_violation_is_located() {
    let (_, p) = builtin("bilateral_clip_1d");
    let (u, _) = solve_complementarity(&p, &SolverConfig::default()).unwrap();
    let node = p.grid().len() / 3;
    let mut v = u.values().to_vec();
    v[node] = p.psi().get(node) + 1.0;
    let bad = ScalarField::new(*p.grid(), v).unwrap();
    let d = verify_solution(&p, &bad, 1e-9).unwrap();
    assert!(!d.passed());
    assert_eq!(d.obstacle_violation.node, Some(node));
    assert!((d.obstacle_violation.value - 1.0).abs() < 1e-12);
    assert!(assemble_residual(&p, &bad).unwrap().get(node) > 0.0);
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let (_, p) = builtin("pucci_2d_bilateral");
    let config = SolverConfig::default();
    let (a, ra) = solve_complementarity(&p, &config).unwrap();
    let (b, rb) = solve_complementarity(&p, &config).unwrap();
    assert_eq!(a.values(), b.values());
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
}

fn builtin(name: &str) -> (obstacle::scenario::ScenarioConfig, ProblemSpec) {
    let c = parse_config(name).unwrap();
    let p = c.build_problem().unwrap();
    (c, p)
}
