//! Pointwise evaluation of `F(x, xi, X)`: built-in operator families, Pucci
//! extremal operators, the min-max reduction behind the obstacle equation, and
//! sampling checks of the structure condition and of x-continuity.

mod isaacs;
mod pucci;
mod spec;
mod structure;
mod symmat;
mod theta;

pub use isaacs::{minmax_reduction, minmax_with, MinMax, Regime, TieBreak};
pub use pucci::{pucci_extremal, Ellipticity, PucciSign};
pub(crate) use pucci::extremal_weight;
pub use spec::{eval_operator, Coefficient, CustomOperator, LinearCoefficients, OperatorKind, OperatorSpec};
pub use structure::{check_structure_condition, random_symmetric, StructureReport, Witness};
pub use symmat::SymMatrix;
pub use theta::{theta_estimate, theta_samples, ThetaEstimate, DEFAULT_MATRIX_SAMPLES, DEFAULT_NORM_CAP};
