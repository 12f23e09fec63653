use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::config::ScenarioConfig;
use crate::grid::{Grid, ScalarField};
use crate::operators::Regime;
use crate::problem::ProblemSpec;

pub const TOOL: &str = "obstacle";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the canonical configuration text, output directory excluded.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let mut canonical = config.clone();
    canonical.output.dir = None;
    let digest = Sha256::digest(canonical.serialize().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Provenance block leading every emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Header {
    pub fn new(config: &ScenarioConfig) -> Self {
        Header { tool: TOOL, version: VERSION, scenario: config.name.clone(), config_sha256: config_hash(config), seed: config.seed }
    }

    /// Comment line used by the CSV files.
    pub fn comment(&self) -> String {
        format!("# {} {} scenario={} config={} seed={}", self.tool, self.version, self.scenario, self.config_sha256, self.seed)
    }
}

/// One output file held in memory until it is written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{file} line {line}: {message}")]
    Format { file: String, line: usize, message: String },
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, ArtifactError> {
    fs::create_dir_all(dir).map_err(|source| ArtifactError::Io { path: dir.to_path_buf(), source })?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            fs::write(&path, &a.contents).map_err(|source| ArtifactError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}

fn regime_name(label: Option<Regime>) -> &'static str {
    label.map_or("boundary", |r| r.as_str())
}

/// Solution table: one row per node in index order, 17 significant digits.
pub fn solution_csv(header: &Header, problem: &ProblemSpec, u: &ScalarField, regimes: &[Option<Regime>]) -> String {
    let grid = problem.grid();
    let dim = grid.dim();
    let mut s = header.comment();
    s.push('\n');
    s.push_str(if dim == 1 { "x1,u,phi,psi,f,regime\n" } else { "x1,x2,u,phi,psi,f,regime\n" });
    for k in 0..grid.len() {
        let x = grid.coords(k);
        for value in x[..dim].iter().chain([u.get(k), problem.phi().get(k), problem.psi().get(k), problem.f().get(k)].iter()) {
            let _ = write!(s, "{value:.16e},");
        }
        s.push_str(regime_name(regimes.get(k).copied().flatten()));
        s.push('\n');
    }
    s
}

/// Contents of a solution table.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub header: String,
    pub coords: Vec<[f64; 2]>,
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub f: Vec<f64>,
    pub regimes: Vec<Option<Regime>>,
}

impl SolutionTable {
    /// Solution values as a field on `grid`, checking the node coordinates.
    pub fn field_on(&self, grid: &Grid) -> Result<ScalarField, ArtifactError> {
        let bad = |line: usize, message: String| ArtifactError::Format { file: "solution.csv".into(), line, message };
        if self.u.len() != grid.len() {
            return Err(bad(0, format!("{} rows for a grid of {} nodes", self.u.len(), grid.len())));
        }
        let tol = 1e-9 * grid.min_spacing();
        for (k, c) in self.coords.iter().enumerate() {
            let x = grid.coords(k);
            if (0..grid.dim()).any(|a| (x[a] - c[a]).abs() > tol) {
                return Err(bad(k + 3, format!("node coordinates {c:?} do not match the grid")));
            }
        }
        ScalarField::new(*grid, self.u.clone()).map_err(|e| bad(0, e.to_string()))
    }
}

pub fn read_solution_csv(text: &str) -> Result<SolutionTable, ArtifactError> {
    let bad = |line: usize, message: &str| ArtifactError::Format { file: "solution.csv".into(), line, message: message.into() };
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) if l.starts_with('#') => l.to_string(),
        _ => return Err(bad(1, "missing header line")),
    };
    let dim = match lines.next() {
        Some((_, "x1,u,phi,psi,f,regime")) => 1,
        Some((_, "x1,x2,u,phi,psi,f,regime")) => 2,
        _ => return Err(bad(2, "unexpected column names")),
    };
    let mut t = SolutionTable { header, coords: vec![], u: vec![], phi: vec![], psi: vec![], f: vec![], regimes: vec![] };
    for (i, line) in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != dim + 5 {
            return Err(bad(i + 1, "wrong number of columns"));
        }
        let nums: Vec<f64> = cols[..dim + 4]
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(i + 1, "unparsable number"))?;
        let mut c = [0.0; 2];
        c[..dim].copy_from_slice(&nums[..dim]);
        t.coords.push(c);
        t.u.push(nums[dim]);
        t.phi.push(nums[dim + 1]);
        t.psi.push(nums[dim + 2]);
        t.f.push(nums[dim + 3]);
        t.regimes.push(match cols[dim + 4] {
            "boundary" => None,
            "pde" => Some(Regime::Pde),
            "upper" => Some(Regime::Upper),
            "lower" => Some(Regime::Lower),
            _ => return Err(bad(i + 1, "unknown regime")),
        });
    }
    Ok(t)
}

/// Long-format table `table,index,key,value` used for analysis output.
#[derive(Debug, Default)]
pub struct LongTable {
    rows: Vec<(String, usize, String, f64)>,
}

impl LongTable {
    pub fn push(&mut self, table: &str, index: usize, key: &str, value: f64) {
        self.rows.push((table.to_string(), index, key.to_string(), value));
    }

    pub fn push_opt(&mut self, table: &str, index: usize, key: &str, value: Option<f64>) {
        self.push(table, index, key, value.unwrap_or(f64::NAN));
    }

    pub fn render(&self, header: &Header) -> String {
        let mut s = header.comment();
        s.push_str("\ntable,index,key,value\n");
        for (t, i, k, v) in &self.rows {
            let _ = writeln!(s, "{t},{i},{k},{v:.16e}");
        }
        s
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
