//! Monotone finite differences for `F`, the obstacle residual, and discrete
//! mollification of the data.

mod mollify;
mod residual;
mod stencil;

pub use mollify::{mollify, shift_obstacles, Extension, Mollified, MollifierKernel};
pub use residual::{assemble_residual, assemble_with};
pub use stencil::{directional_second_difference, discretize_operator, DiscreteOperator, Row, DIRECTIONS};
