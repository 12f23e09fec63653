//! Bilateral obstacle problems for fully nonlinear uniformly elliptic operators,
//!
//! ```text
//! min{ max{ F(x, Du, D^2u) - f, u - psi }, u - phi } = 0  in Omega,   u = g  on the boundary,
//! ```
//!
//! on rectangles in one or two dimensions. The crate provides
//!
//! - [`operators`]: Pucci extremal operators, linear and Bellman families, the
//!   min-max reduction of the obstacle equation, and sampling checks of the
//!   structure condition;
//! - [`discretize`]: a monotone finite-difference scheme, the obstacle
//!   residual, and mollification/shift of the data;
//! - [`solvers`]: a penalization solver with continuation in the penalty
//!   parameter and a policy-iteration solver for the complementarity form;
//! - [`analysis`]: contact sets, oscillation decay, Hoelder exponents of the
//!   solution and its gradient, and Harnack-type ratio probes;
//! - [`scenario`]: configuration files, built-in scenarios and the run
//!   orchestration used by the `obstacle` binary.

pub mod analysis;
pub mod discretize;
mod error;
pub mod exponents;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod problem;
pub mod scenario;
pub mod solvers;

pub use error::{Error, Result};
pub use exponents::{compute_exponents, ExponentSet};
pub use grid::{Grid, ScalarField};
pub use norms::{lp_quasinorm, sample_modulus, Modulus, ModulusSample};
pub use problem::{ProblemData, ProblemSpec};
