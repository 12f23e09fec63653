//! Measured regularity quantities of discrete solutions: coincidence sets,
//! oscillation decay, Holder exponents of `u` and `Du`, Harnack-type ratios.
//!
//! Nothing here certifies a constant. Every estimator reports what it saw on
//! the given grid, and degenerate inputs are flagged rather than hidden.

mod continuity;
mod harnack;
mod holder;
mod oscillation;
mod partition;

pub use continuity::continuity_smallness;
pub use harnack::{harnack_probe, local_max_probe, HarnackProbe, ProbeMode};
pub use holder::{gradient_holder, holder_exponent, GradientHolder, HolderBin, HolderFit};
pub use oscillation::{dyadic_radii, oscillation_decay, OscillationLevel, OscillationTrace};
pub use partition::{coincidence_sets, default_contact_tolerance, RegimePartition};
