use std::fmt;
use std::sync::Arc;

use super::pucci::{pucci, Ellipticity, PucciSign};
use super::structure::StructureReport;
use super::SymMatrix;
use crate::error::{Error, Result};

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type OperatorFn = Arc<dyn Fn(&[f64], &[f64], &SymMatrix) -> f64 + Send + Sync>;

/// A scalar coefficient, either constant or a function of position.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Function(PointFn),
}

impl Coefficient {
    pub fn function(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(x),
        }
    }

    pub fn zero() -> Self {
        Coefficient::Constant(0.0)
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// `-Tr(A(x) X) + b(x) . xi` with `A = [[a11, a12], [a12, a22]]`.
/// In one dimension only `a11` and `b[0]` are read.
#[derive(Debug, Clone)]
pub struct LinearCoefficients {
    pub a11: Coefficient,
    pub a12: Coefficient,
    pub a22: Coefficient,
    pub b: [Coefficient; 2],
}

impl LinearCoefficients {
    /// `-a Tr(X)` with no drift.
    pub fn isotropic(a: f64) -> Self {
        LinearCoefficients {
            a11: a.into(),
            a12: 0.0.into(),
            a22: a.into(),
            b: [Coefficient::zero(), Coefficient::zero()],
        }
    }

    /// The negative Laplacian `-Tr(X)`.
    pub fn laplacian() -> Self {
        Self::isotropic(1.0)
    }

    pub fn matrix(&self, x: &[f64], n: usize) -> SymMatrix {
        if n == 1 {
            SymMatrix::new1(self.a11.eval(x))
        } else {
            SymMatrix::new2(self.a11.eval(x), self.a12.eval(x), self.a22.eval(x))
        }
    }

    pub fn drift(&self, x: &[f64], n: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (a, o) in out.iter_mut().enumerate().take(n) {
            *o = self.b[a].eval(x);
        }
        out
    }

    fn eval(&self, x: &[f64], xi: &[f64], m: &SymMatrix) -> f64 {
        let n = m.dim();
        let b = self.drift(x, n);
        -self.matrix(x, n).trace_product(m) + (0..n).map(|a| b[a] * xi[a]).sum::<f64>()
    }
}

/// A user-supplied `F(x, xi, X)` with a declared gradient bound `mu`.
#[derive(Clone)]
pub struct CustomOperator {
    pub func: OperatorFn,
    pub mu: Coefficient,
}

impl fmt::Debug for CustomOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomOperator").field("mu", &self.mu).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum OperatorKind {
    Linear(LinearCoefficients),
    /// Pointwise maximum over a family of linear operators.
    BellmanMax(Vec<LinearCoefficients>),
    /// `P+(X) + mu(x)|xi|`.
    PucciPlus { mu: Coefficient },
    /// `P-(X) - mu(x)|xi|`.
    PucciMinus { mu: Coefficient },
    Custom(CustomOperator),
}

/// An evaluable operator `F(x, xi, X)` in dimension `n`, tagged with the
/// ellipticity constants it is meant to satisfy.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    dim: usize,
    kind: OperatorKind,
    ellipticity: Ellipticity,
    certified: bool,
}

impl OperatorSpec {
    pub fn new(dim: usize, kind: OperatorKind, lambda: f64, big_lambda: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Dimension { expected: 2, got: dim });
        }
        if let OperatorKind::BellmanMax(members) = &kind {
            if members.is_empty() {
                return Err(Error::NonMonotone("Bellman family has no members".into()));
            }
        }
        Ok(OperatorSpec {
            dim,
            kind,
            ellipticity: Ellipticity::new(lambda, big_lambda)?,
            certified: false,
        })
    }

    pub fn laplacian(dim: usize) -> Self {
        Self::new(dim, OperatorKind::Linear(LinearCoefficients::laplacian()), 1.0, 1.0)
            .expect("valid constants")
    }

    pub fn pucci_plus(dim: usize, lambda: f64, big_lambda: f64, mu: impl Into<Coefficient>) -> Result<Self> {
        Self::new(dim, OperatorKind::PucciPlus { mu: mu.into() }, lambda, big_lambda)
    }

    pub fn pucci_minus(dim: usize, lambda: f64, big_lambda: f64, mu: impl Into<Coefficient>) -> Result<Self> {
        Self::new(dim, OperatorKind::PucciMinus { mu: mu.into() }, lambda, big_lambda)
    }

    pub fn custom(
        dim: usize,
        lambda: f64,
        big_lambda: f64,
        mu: impl Into<Coefficient>,
        func: impl Fn(&[f64], &[f64], &SymMatrix) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let op = CustomOperator { func: Arc::new(func), mu: mu.into() };
        Self::new(dim, OperatorKind::Custom(op), lambda, big_lambda)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn ellipticity(&self) -> Ellipticity {
        self.ellipticity
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, OperatorKind::Custom(_))
    }

    /// Built-in families are trusted; custom ones need a passing report.
    pub fn is_certified(&self) -> bool {
        !self.is_custom() || self.certified
    }

    /// Marks a custom operator as having passed the structure check.
    /// Returns `false` and leaves the spec untouched if the report failed.
    pub fn certify(&mut self, report: &StructureReport) -> bool {
        if report.passed() {
            self.certified = true;
        }
        report.passed()
    }

    /// The coefficient `mu(x)` bounding the first-order part.
    pub fn gradient_bound(&self, x: &[f64]) -> f64 {
        let drift_norm = |c: &LinearCoefficients| {
            let b = c.drift(x, self.dim);
            (b[0] * b[0] + b[1] * b[1]).sqrt()
        };
        match &self.kind {
            OperatorKind::Linear(c) => drift_norm(c),
            OperatorKind::BellmanMax(members) => members.iter().map(drift_norm).fold(0.0, f64::max),
            OperatorKind::PucciPlus { mu } | OperatorKind::PucciMinus { mu } => mu.eval(x),
            OperatorKind::Custom(c) => c.mu.eval(x),
        }
    }
}

/// Evaluates `F(x, xi, X)`.
pub fn eval_operator(spec: &OperatorSpec, x: &[f64], xi: &[f64], m: &SymMatrix) -> Result<f64> {
    let n = spec.dim;
    for got in [x.len(), xi.len(), m.dim()] {
        if got != n {
            return Err(Error::Dimension { expected: n, got });
        }
    }
    let grad_norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(match &spec.kind {
        OperatorKind::Linear(c) => c.eval(x, xi, m),
        OperatorKind::BellmanMax(members) => members
            .iter()
            .map(|c| c.eval(x, xi, m))
            .fold(f64::NEG_INFINITY, f64::max),
        OperatorKind::PucciPlus { mu } => pucci(PucciSign::Plus, m, spec.ellipticity) + mu.eval(x) * grad_norm,
        OperatorKind::PucciMinus { mu } => pucci(PucciSign::Minus, m, spec.ellipticity) - mu.eval(x) * grad_norm,
        OperatorKind::Custom(c) => (c.func)(x, xi, m),
    })
}
