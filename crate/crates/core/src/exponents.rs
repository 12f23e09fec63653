use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integrability and regularity exponents of a problem instance.
///
/// `alpha0 = 2 - n / min(p, n)` is the scaling exponent of the data term,
/// `beta0 = 1 - n / p` exists only when `p > n`, and `beta2 = min(beta0, beta1)`
/// is the expected gradient regularity near the contact set.
///
/// The threshold exponent below which the theory does not apply is not known
/// in closed form; only `n/2 < p <= q` and `q > n` are enforced here, the
/// first so that `alpha0` stays positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub beta1: f64,
    pub alpha0: f64,
    pub beta0: Option<f64>,
    pub beta2: Option<f64>,
}

pub fn compute_exponents(n: usize, p: f64, q: f64, beta1: f64) -> Result<ExponentSet> {
    if n == 0 {
        return Err(Error::InvalidExponents("dimension must be positive".into()));
    }
    let nf = n as f64;
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidExponents(format!("p = {p} must be positive")));
    }
    if p <= 0.5 * nf {
        return Err(Error::InvalidExponents(format!("p = {p} must exceed n/2 = {}", 0.5 * nf)));
    }
    if !q.is_finite() || q <= nf {
        return Err(Error::InvalidExponents(format!("q = {q} must exceed n = {n}")));
    }
    if p > q {
        return Err(Error::InvalidExponents(format!("p = {p} exceeds q = {q}")));
    }
    if !(beta1 > 0.0 && beta1 < 1.0) {
        return Err(Error::InvalidExponents(format!("beta1 = {beta1} not in (0,1)")));
    }
    let alpha0 = 2.0 - nf / p.min(nf);
    let beta0 = (p > nf).then(|| 1.0 - nf / p);
    Ok(ExponentSet {
        n,
        p,
        q,
        beta1,
        alpha0,
        beta0,
        beta2: beta0.map(|b| b.min(beta1)),
    })
}

impl ExponentSet {
    /// The integrability exponent `min(p, n)` used for data norms.
    pub fn data_exponent(&self) -> f64 {
        self.p.min(self.n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_high_integrability() {
        let e = compute_exponents(2, 4.0, 4.0, 0.7).unwrap();
        assert_eq!(e.alpha0, 1.0);
        assert_eq!(e.beta0, Some(0.5));
        assert_eq!(e.beta2, Some(0.5));
    }

    #[test]
    fn low_integrability_in_three_dimensions() {
        let e = compute_exponents(3, 2.0, 4.0, 0.9).unwrap();
        assert_eq!(e.alpha0, 0.5);
        assert_eq!(e.beta0, None);
        assert_eq!(e.beta2, None);
    }

    #[test]
    fn rejects_q_below_dimension() {
        assert!(compute_exponents(2, 2.0, 1.0, 0.5).is_err());
        assert!(compute_exponents(2, 5.0, 4.0, 0.5).is_err());
        assert!(compute_exponents(1, 2.0, 2.0, 1.0).is_err());
        assert!(compute_exponents(1, 0.0, 2.0, 0.5).is_err());
        assert!(compute_exponents(2, 1.0, 3.0, 0.5).is_err());
    }
}
