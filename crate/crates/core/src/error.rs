use thiserror::Error;

/// Input and validation errors shared by the grid, operator, discretization and
/// analysis layers. Solver and configuration failures have their own types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid node count {expected}")]
    FieldLength { expected: usize, got: usize },

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("region is empty")]
    EmptyRegion,

    #[error("node {node} is out of range for a grid of {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },

    #[error("exponent {0} must be positive")]
    NonPositiveExponent(f64),

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("invalid ellipticity bounds: lambda = {lambda}, Lambda = {big_lambda}")]
    Ellipticity { lambda: f64, big_lambda: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("problem data violates {constraint} at node {node}")]
    ProblemData { constraint: &'static str, node: usize },

    #[error("operator cannot be discretized monotonically: {0}")]
    NonMonotone(String),

    #[error("custom operators have no monotone discretization")]
    CustomOperator,

    #[error("node {node} has no neighbor along direction {direction:?}")]
    MissingNeighbor { node: usize, direction: [isize; 2] },

    #[error("invalid radius {0}")]
    InvalidRadius(f64),

    #[error("modulus samples do not cover radius {0}")]
    ModulusCoverage(f64),

    #[error("shifted obstacles break the ordering at node {node}")]
    ShiftOrdering { node: usize },

    #[error("node {node} is within tolerance of both obstacles although a separation r0 was declared")]
    AmbiguousContact { node: usize },

    #[error("ball of radius {radius} around the center leaves the domain")]
    BallOutsideDomain { radius: f64 },

    #[error("not enough data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
