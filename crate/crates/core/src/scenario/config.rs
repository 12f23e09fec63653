use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::builtins::builtin_text;
use super::expr::Expr;
use crate::discretize::DiscreteOperator;
use crate::error::Error;
use crate::exponents::compute_exponents;
use crate::grid::{Grid, ScalarField};
use crate::operators::{Coefficient, LinearCoefficients, OperatorKind, OperatorSpec, TieBreak};
use crate::problem::{ProblemData, ProblemSpec};
use crate::solvers::{DeltaSchedule, SolverConfig};

/// A configuration problem tied to the offending key and, when known, line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}key '{key}': {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        ConfigError { line, key: key.to_string(), message: message.into() }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("", &["scenario", "name", "seed"]),
    ("grid", &["lower", "upper", "nodes"]),
    ("operator", &["family", "lambda", "big_lambda", "mu", "a11", "a12", "a22", "b1", "b2"]),
    ("data", &["f", "phi", "psi", "g", "exact", "p", "q", "beta1", "r0", "exponent_dim"]),
    ("solver", &["solver", "tolerance", "max_iterations", "delta0", "delta_factor", "delta_floor", "epsilon", "damping", "tie_break"]),
    ("output", &["dir", "center", "eps0", "holder_margin", "contact_tol"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Bellman,
    PucciPlus,
    PucciMinus,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Bellman => "bellman",
            Family::PucciPlus => "pucci_plus",
            Family::PucciMinus => "pucci_minus",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "linear" => Family::Linear,
            "bellman" => Family::Bellman,
            "pucci_plus" => Family::PucciPlus,
            "pucci_minus" => Family::PucciMinus,
            _ => return None,
        })
    }

    fn is_pucci(&self) -> bool {
        matches!(self, Family::PucciPlus | Family::PucciMinus)
    }
}

/// Which solver(s) a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Penalization with continuation in the penalty parameter.
    Penalized,
    /// Policy iteration on the complementarity form.
    Direct,
    Both,
}

impl SolverChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverChoice::Penalized => "penalized",
            SolverChoice::Direct => "direct",
            SolverChoice::Both => "both",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "penalized" => SolverChoice::Penalized,
            "direct" => SolverChoice::Direct,
            "both" => SolverChoice::Both,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub nodes: Vec<usize>,
}

/// Coefficients of one linear operator `-Tr(A X) + b . xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMember {
    pub a11: Expr,
    pub a12: Expr,
    pub a22: Expr,
    pub b1: Expr,
    pub b2: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorConfig {
    pub family: Family,
    pub lambda: f64,
    pub big_lambda: f64,
    /// Gradient coefficient of the Pucci families.
    pub mu: Expr,
    /// One member for `linear`, several for `bellman`, none for Pucci.
    pub members: Vec<LinearMember>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataConfig {
    pub f: Expr,
    pub phi: Expr,
    pub psi: Expr,
    pub g: Expr,
    /// Closed-form solution, when known.
    pub exact: Option<Expr>,
    pub p: f64,
    pub q: f64,
    pub beta1: f64,
    pub r0: Option<f64>,
    /// Dimension used for the exponent bookkeeping; defaults to the grid's.
    pub exponent_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<String>,
    /// Center of oscillation and Harnack probes; defaults to the domain midpoint.
    pub center: Option<Vec<f64>>,
    pub eps0: f64,
    /// Distance from the boundary of the region used for gradient regularity;
    /// defaults to a tenth of the smallest side.
    pub holder_margin: Option<f64>,
    /// Contact tolerance; defaults to `10 * tolerance + h^2`.
    pub contact_tol: Option<f64>,
}

/// A complete, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub grid: GridConfig,
    pub operator: OperatorConfig,
    pub data: DataConfig,
    pub solver: SolverConfig,
    pub choice: SolverChoice,
    pub output: OutputConfig,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: Option<usize>,
}

type Entries = BTreeMap<(String, String), Entry>;

fn lex(text: &str, lines: bool) -> Result<Entries, ConfigError> {
    let mut out = Entries::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = lines.then_some(i + 1);
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(content, line, "malformed section header"))?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name && !name.is_empty()) {
                return Err(ConfigError::new(name, line, "unknown section"));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::new(content, line, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        let full = qualified(&section, key);
        let known = KEYS.iter().any(|(s, keys)| *s == section && keys.contains(&key));
        if !known {
            return Err(ConfigError::new(&full, line, "unknown key"));
        }
        if value.is_empty() {
            return Err(ConfigError::new(&full, line, "empty value"));
        }
        if out.insert((section.clone(), key.to_string()), Entry { value: value.to_string(), line }).is_some() {
            return Err(ConfigError::new(&full, line, "duplicate key"));
        }
    }
    Ok(out)
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

struct Reader {
    entries: Entries,
}

impl Reader {
    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.entry(section, key).and_then(|e| e.line)
    }

    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(&qualified(section, key), self.line(section, key), message)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entry(section, key).map(|e| e.value.as_str())
    }

    fn required(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.raw(section, key).ok_or_else(|| self.err(section, key, "missing required key"))
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str, text: &str) -> Result<T, ConfigError> {
        text.trim().parse().map_err(|_| self.err(section, key, format!("cannot parse '{}'", text.trim())))
    }

    fn number(&self, section: &str, key: &str, default: Option<f64>) -> Result<f64, ConfigError> {
        match (self.raw(section, key), default) {
            (Some(v), _) => {
                let x: f64 = self.parse(section, key, v)?;
                if !x.is_finite() {
                    return Err(self.err(section, key, "must be finite"));
                }
                Ok(x)
            }
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.err(section, key, "missing required key")),
        }
    }

    fn optional_number(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(section, key).map(|_| self.number(section, key, None)).transpose()
    }

    fn list<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>, ConfigError> {
        self.required(section, key)?.split(',').map(|v| self.parse(section, key, v)).collect()
    }

    fn expr(&self, section: &str, key: &str, text: &str) -> Result<Expr, ConfigError> {
        Expr::parse(text).map_err(|e| self.err(section, key, format!("expression error: {e}")))
    }

    fn expr_or(&self, section: &str, key: &str, default: &str) -> Result<Expr, ConfigError> {
        self.expr(section, key, self.raw(section, key).unwrap_or(default))
    }
}

/// Parses a configuration text.
///
/// The text is either the bare name of a built-in scenario or a sequence of
/// `key = value` lines, optionally grouped under `[grid]`, `[operator]`,
/// `[data]`, `[solver]` and `[output]`. A top-level `scenario = <name>` loads
/// a built-in scenario first and lets the remaining keys override it.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let trimmed = text.trim();
    if !trimmed.is_empty() && !trimmed.contains(['=', '[', '\n']) {
        let base = builtin_text(trimmed).ok_or_else(|| ConfigError::new("scenario", None, format!("unknown scenario '{trimmed}'")))?;
        return from_entries(lex(base, false)?);
    }
    let mut entries = lex(text, true)?;
    if let Some(base) = entries.remove(&(String::new(), "scenario".to_string())) {
        let builtin = builtin_text(&base.value)
            .ok_or_else(|| ConfigError::new("scenario", base.line, format!("unknown scenario '{}'", base.value)))?;
        let mut merged = lex(builtin, false)?;
        merged.extend(entries);
        entries = merged;
    }
    from_entries(entries)
}

fn from_entries(entries: Entries) -> Result<ScenarioConfig, ConfigError> {
    let r = Reader { entries };
    let name = r.raw("", "name").unwrap_or("custom").to_string();
    let seed = match r.raw("", "seed") {
        Some(v) => r.parse("", "seed", v)?,
        None => 0,
    };

    let grid = GridConfig { lower: r.list("grid", "lower")?, upper: r.list("grid", "upper")?, nodes: r.list("grid", "nodes")? };
    let dim = grid.lower.len();
    if !(1..=2).contains(&dim) {
        return Err(r.err("grid", "lower", format!("expected 1 or 2 coordinates, got {dim}")));
    }
    for key in ["upper", "nodes"] {
        let len = if key == "upper" { grid.upper.len() } else { grid.nodes.len() };
        if len != dim {
            return Err(r.err("grid", key, format!("expected {dim} entries to match grid.lower, got {len}")));
        }
    }

    let family_text = r.raw("operator", "family").unwrap_or("linear");
    let family = Family::parse(family_text)
        .ok_or_else(|| r.err("operator", "family", format!("unknown family '{family_text}' (linear, bellman, pucci_plus, pucci_minus)")))?;
    let lambda = r.number("operator", "lambda", Some(1.0))?;
    let big_lambda = r.number("operator", "big_lambda", Some(lambda.max(1.0)))?;
    if !(lambda > 0.0) {
        return Err(r.err("operator", "lambda", format!("lambda = {lambda} must be positive")));
    }
    if lambda > big_lambda {
        return Err(r.err("operator", "lambda", format!("lambda = {lambda} exceeds big_lambda = {big_lambda}")));
    }
    let coefficient_keys = ["a11", "a12", "a22", "b1", "b2"];
    let members = if family.is_pucci() {
        if let Some(key) = coefficient_keys.iter().find(|k| r.raw("operator", k).is_some()) {
            return Err(r.err("operator", key, "linear coefficients do not apply to the pucci families"));
        }
        Vec::new()
    } else {
        if r.raw("operator", "mu").is_some() {
            return Err(r.err("operator", "mu", "mu applies to the pucci families only; the drift bounds it for linear operators"));
        }
        let defaults = ["1", "0", "1", "0", "0"];
        let split: Vec<Vec<&str>> = coefficient_keys
            .iter()
            .zip(defaults)
            .map(|(k, d)| r.raw("operator", k).unwrap_or(d).split('|').collect())
            .collect();
        let count = split.iter().map(Vec::len).max().unwrap_or(1);
        if family == Family::Linear && count != 1 {
            return Err(r.err("operator", "family", "several '|'-separated members need family = bellman"));
        }
        let mut members = Vec::with_capacity(count);
        for m in 0..count {
            let mut exprs = Vec::with_capacity(5);
            for (i, key) in coefficient_keys.iter().enumerate() {
                let parts = &split[i];
                let text = match parts.len() {
                    1 => parts[0],
                    n if n == count => parts[m],
                    n => return Err(r.err("operator", key, format!("{n} members given, expected 1 or {count}"))),
                };
                exprs.push(r.expr("operator", key, text)?);
            }
            let mut it = exprs.into_iter();
            let mut next = || it.next().expect("five coefficients");
            members.push(LinearMember { a11: next(), a12: next(), a22: next(), b1: next(), b2: next() });
        }
        members
    };
    let operator = OperatorConfig { family, lambda, big_lambda, mu: r.expr_or("operator", "mu", "0")?, members };

    let default_p = dim as f64 + 1.0;
    let data = DataConfig {
        f: r.expr("data", "f", r.required("data", "f")?)?,
        phi: r.expr("data", "phi", r.required("data", "phi")?)?,
        psi: r.expr("data", "psi", r.required("data", "psi")?)?,
        g: r.expr("data", "g", r.required("data", "g")?)?,
        exact: r.raw("data", "exact").map(|t| r.expr("data", "exact", t)).transpose()?,
        p: r.number("data", "p", Some(default_p))?,
        q: r.number("data", "q", Some(default_p))?,
        beta1: r.number("data", "beta1", Some(0.5))?,
        r0: r.optional_number("data", "r0")?,
        exponent_dim: r.raw("data", "exponent_dim").map(|v| r.parse("data", "exponent_dim", v)).transpose()?,
    };

    let defaults = SolverConfig::default();
    let choice_text = r.raw("solver", "solver").unwrap_or("both");
    let choice = SolverChoice::parse(choice_text)
        .ok_or_else(|| r.err("solver", "solver", format!("unknown solver '{choice_text}' (penalized, direct, both)")))?;
    let tie_text = r.raw("solver", "tie_break").unwrap_or(defaults.tie_break.as_str());
    let tie_break = match tie_text {
        "prefer_equation" => TieBreak::PreferEquation,
        "prefer_contact" => TieBreak::PreferContact,
        other => return Err(r.err("solver", "tie_break", format!("unknown rule '{other}' (prefer_equation, prefer_contact)"))),
    };
    let solver = SolverConfig {
        tolerance: r.number("solver", "tolerance", Some(defaults.tolerance))?,
        max_iterations: match r.raw("solver", "max_iterations") {
            Some(v) => r.parse("solver", "max_iterations", v)?,
            None => defaults.max_iterations,
        },
        delta_schedule: DeltaSchedule {
            initial: r.number("solver", "delta0", Some(defaults.delta_schedule.initial))?,
            factor: r.number("solver", "delta_factor", Some(defaults.delta_schedule.factor))?,
            floor: r.number("solver", "delta_floor", Some(defaults.delta_schedule.floor))?,
        },
        epsilon: r.number("solver", "epsilon", Some(defaults.epsilon))?,
        damping: r.number("solver", "damping", Some(defaults.damping))?,
        tie_break,
    };
    solver.validate().map_err(|e| r.err("solver", first_solver_key(&r), e.to_string()))?;

    let output = OutputConfig {
        dir: r.raw("output", "dir").map(str::to_string),
        center: r.raw("output", "center").map(|_| r.list("output", "center")).transpose()?,
        eps0: r.number("output", "eps0", Some(0.5))?,
        holder_margin: r.optional_number("output", "holder_margin")?,
        contact_tol: r.optional_number("output", "contact_tol")?,
    };
    if let Some(c) = &output.center {
        if c.len() != dim {
            return Err(r.err("output", "center", format!("expected {dim} coordinates")));
        }
    }
    if !(output.eps0 > 0.0) {
        return Err(r.err("output", "eps0", "must be positive"));
    }

    let config = ScenarioConfig { name, seed, grid, operator, data, solver, choice, output };
    config.build_with(&r)?;
    Ok(config)
}

fn first_solver_key(r: &Reader) -> &'static str {
    ["tolerance", "max_iterations", "delta0", "delta_factor", "delta_floor", "damping", "epsilon"]
        .into_iter()
        .find(|k| r.raw("solver", k).is_some())
        .unwrap_or("tolerance")
}

fn coefficient(e: &Expr) -> Coefficient {
    match e.as_constant() {
        Some(c) => Coefficient::Constant(c),
        None => {
            let e = e.clone();
            Coefficient::function(move |x| e.eval(x))
        }
    }
}

impl LinearMember {
    fn coefficients(&self) -> LinearCoefficients {
        LinearCoefficients {
            a11: coefficient(&self.a11),
            a12: coefficient(&self.a12),
            a22: coefficient(&self.a22),
            b: [coefficient(&self.b1), coefficient(&self.b2)],
        }
    }
}

impl ScenarioConfig {
    pub fn dim(&self) -> usize {
        self.grid.lower.len()
    }

    pub fn make_grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(&self.grid.lower, &self.grid.upper, &self.grid.nodes).map_err(|e| ConfigError::new("grid", None, e.to_string()))
    }

    /// The same scenario on a grid with `nodes` points per axis.
    pub fn with_nodes(&self, nodes: usize) -> Self {
        let mut c = self.clone();
        c.grid.nodes = vec![nodes; self.dim()];
        c
    }

    /// Evaluates the expressions on the grid and validates the problem.
    pub fn build_problem(&self) -> Result<ProblemSpec, ConfigError> {
        self.build_with(&Reader { entries: Entries::new() })
    }

    fn build_with(&self, r: &Reader) -> Result<ProblemSpec, ConfigError> {
        let grid = Grid::new(&self.grid.lower, &self.grid.upper, &self.grid.nodes).map_err(|e| r.err("grid", "nodes", e.to_string()))?;
        let dim = grid.dim();
        let op = &self.operator;
        let kind = match op.family {
            Family::Linear => OperatorKind::Linear(op.members[0].coefficients()),
            Family::Bellman => OperatorKind::BellmanMax(op.members.iter().map(LinearMember::coefficients).collect()),
            Family::PucciPlus => OperatorKind::PucciPlus { mu: coefficient(&op.mu) },
            Family::PucciMinus => OperatorKind::PucciMinus { mu: coefficient(&op.mu) },
        };
        let operator = OperatorSpec::new(dim, kind, op.lambda, op.big_lambda).map_err(|e| {
            let key = if matches!(e, Error::Ellipticity { .. }) { "lambda" } else { "family" };
            r.err("operator", key, e.to_string())
        })?;
        DiscreteOperator::new(&operator, &grid).map_err(|e| r.err("operator", "family", e.to_string()))?;

        let d = &self.data;
        let exponents = compute_exponents(d.exponent_dim.unwrap_or(dim), d.p, d.q, d.beta1).map_err(|e| r.err("data", "p", e.to_string()))?;
        let field = |key: &str, e: &Expr| ScalarField::from_fn(grid, |x| e.eval(x)).map_err(|err| r.err("data", key, err.to_string()));
        let (f, phi, psi, g) = (field("f", &d.f)?, field("phi", &d.phi)?, field("psi", &d.psi)?, field("g", &d.g)?);
        if let Some(exact) = &d.exact {
            field("exact", exact)?;
        }
        ProblemSpec::new(ProblemData { grid, operator, f, phi, psi, g, exponents, r0: d.r0 }).map_err(|e| {
            let key = match &e {
                Error::ProblemData { constraint, .. } if constraint.contains("r0") => ("data", "r0"),
                Error::ProblemData { constraint, .. } if constraint.contains("g <=") => ("data", "g"),
                Error::ProblemData { constraint, .. } if constraint.contains("mu") => ("operator", "b1"),
                Error::ProblemData { .. } => ("data", "psi"),
                _ => ("data", "f"),
            };
            r.err(key.0, key.1, e.to_string())
        })
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "name = {}\nseed = {}\n", self.name, self.seed);
        let _ = writeln!(s, "[grid]\nlower = {}\nupper = {}", list(&self.grid.lower), list(&self.grid.upper));
        let nodes = self.grid.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "nodes = {nodes}\n");

        let op = &self.operator;
        let _ = writeln!(s, "[operator]\nfamily = {}\nlambda = {}\nbig_lambda = {}", op.family.as_str(), op.lambda, op.big_lambda);
        if op.family.is_pucci() {
            let _ = writeln!(s, "mu = {}", op.mu);
        } else {
            let join = |get: fn(&LinearMember) -> &Expr| op.members.iter().map(|m| get(m).source()).collect::<Vec<_>>().join(" | ");
            let _ = writeln!(s, "a11 = {}", join(|m| &m.a11));
            let _ = writeln!(s, "a12 = {}", join(|m| &m.a12));
            let _ = writeln!(s, "a22 = {}", join(|m| &m.a22));
            let _ = writeln!(s, "b1 = {}", join(|m| &m.b1));
            let _ = writeln!(s, "b2 = {}", join(|m| &m.b2));
        }

        let d = &self.data;
        let _ = writeln!(s, "\n[data]\nf = {}\nphi = {}\npsi = {}\ng = {}", d.f, d.phi, d.psi, d.g);
        if let Some(e) = &d.exact {
            let _ = writeln!(s, "exact = {e}");
        }
        let _ = writeln!(s, "p = {}\nq = {}\nbeta1 = {}", d.p, d.q, d.beta1);
        if let Some(r0) = d.r0 {
            let _ = writeln!(s, "r0 = {r0}");
        }
        if let Some(n) = d.exponent_dim {
            let _ = writeln!(s, "exponent_dim = {n}");
        }

        let c = &self.solver;
        let _ = writeln!(
            s,
            "\n[solver]\nsolver = {}\ntolerance = {}\nmax_iterations = {}\ndelta0 = {}\ndelta_factor = {}\ndelta_floor = {}\nepsilon = {}\ndamping = {}\ntie_break = {}",
            self.choice.as_str(),
            c.tolerance,
            c.max_iterations,
            c.delta_schedule.initial,
            c.delta_schedule.factor,
            c.delta_schedule.floor,
            c.epsilon,
            c.damping,
            c.tie_break.as_str()
        );

        let o = &self.output;
        let _ = writeln!(s, "\n[output]");
        if let Some(dir) = &o.dir {
            let _ = writeln!(s, "dir = {dir}");
        }
        if let Some(center) = &o.center {
            let _ = writeln!(s, "center = {}", list(center));
        }
        let _ = writeln!(s, "eps0 = {}", o.eps0);
        if let Some(m) = o.holder_margin {
            let _ = writeln!(s, "holder_margin = {m}");
        }
        if let Some(t) = o.contact_tol {
            let _ = writeln!(s, "contact_tol = {t}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "
name = small
[grid]
lower = -1
upper = 1
nodes = 17
[data]
f = 2
phi = -10
psi = 10
g = 0
";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(SMALL).unwrap();
        assert_eq!(c.name, "small");
        assert_eq!(c.operator.family, Family::Linear);
        assert_eq!(c.choice, SolverChoice::Both);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.data.p, 2.0);
        c.build_problem().unwrap();
    }

    #[test]
    fn round_trip() {
        let c = parse_config(SMALL).unwrap();
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
        let text = format!("{SMALL}\n[operator]\nfamily = bellman\na11 = 1 | 2\nb1 = 0 | 0.5*x1\n[output]\ncenter = 0.25\ncontact_tol = 1e-9\n");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.operator.members.len(), 2);
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn diagnostics_name_key_and_line() {
        let e = parse_config("[grid]\nlower = 0\nupper = 1\nnodes = 9\nspacing = 3\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("grid.spacing", Some(5)));
        let e = parse_config("[mesh]\n").unwrap_err();
        assert_eq!(e.message, "unknown section");
        let e = parse_config(&format!("{SMALL}[operator]\nlambda = 3\nbig_lambda = 2\n")).unwrap_err();
        assert_eq!(e.key, "operator.lambda");
        assert!(e.to_string().contains("line"));
        let e = parse_config("[grid]\nlower = 0\nupper = 1\nnodes = 9\n[data]\nf = 1\nphi = 0\npsi = 1\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.message.as_str()), ("data.g", "missing required key"));
        let e = parse_config(&SMALL.replace("phi = -10", "phi = 1 +")).unwrap_err();
        assert_eq!(e.key, "data.phi");
        let e = parse_config(&SMALL.replace("g = 0", "g = 20")).unwrap_err();
        assert_eq!(e.key, "data.g");
    }

    #[test]
    fn scenario_key_loads_builtin_and_overrides() {
        let c = parse_config("scenario = poisson_no_contact\n[grid]\nnodes = 65\n").unwrap();
        assert_eq!(c.name, "poisson_no_contact");
        assert_eq!(c.grid.nodes, vec![65]);
        assert!(parse_config("scenario = nowhere\n").is_err());
    }
}
