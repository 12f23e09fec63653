use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::{eval_operator, OperatorSpec};
use super::SymMatrix;
use crate::error::Result;

pub const DEFAULT_NORM_CAP: f64 = 1e3;
pub const DEFAULT_MATRIX_SAMPLES: usize = 1000;

/// Sampled supremum of `|F(x,0,X) - F(y,0,X)| / (1 + ||X||)` together with the
/// largest matrix norm that was probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub value: f64,
    pub norm_cap: f64,
}

/// Matrix probes for [`theta_estimate`]: `+-cap I`, `cap diag(1,-1)` and
/// random matrices whose spectral norm is spread over `(0, cap]`.
pub fn theta_samples(n: usize, cap: f64, count: usize, seed: u64) -> Vec<SymMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![SymMatrix::identity(n) * cap, SymMatrix::identity(n) * -cap];
    if n == 2 {
        out.push(SymMatrix::diag(&[cap, -cap]));
    }
    while out.len() < count.max(out.len()) {
        let m = super::structure::random_symmetric(&mut rng, n, 1.0);
        let norm = m.norm();
        if norm == 0.0 {
            continue;
        }
        let target = cap * rng.gen::<f64>().powi(2).max(1e-6);
        out.push(m * (target / norm));
    }
    out
}

pub fn theta_estimate(spec: &OperatorSpec, x: &[f64], y: &[f64], samples: &[SymMatrix]) -> Result<ThetaEstimate> {
    let n = spec.dim();
    let zero = vec![0.0; n];
    let mut value = 0.0f64;
    let mut norm_cap = 0.0f64;
    for m in samples {
        let fx = eval_operator(spec, x, &zero, m)?;
        let fy = eval_operator(spec, y, &zero, m)?;
        let norm = m.norm();
        norm_cap = norm_cap.max(norm);
        value = value.max((fx - fy).abs() / (1.0 + norm));
    }
    Ok(ThetaEstimate { value, norm_cap })
}
