use serde::{Deserialize, Serialize};

use super::SymMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PucciSign {
    Plus,
    Minus,
}

/// Ellipticity constants `0 < lambda <= Lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipticity {
    pub lambda: f64,
    pub big_lambda: f64,
}

impl Ellipticity {
    pub fn new(lambda: f64, big_lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= big_lambda && big_lambda.is_finite()) {
            return Err(Error::Ellipticity { lambda, big_lambda });
        }
        Ok(Ellipticity { lambda, big_lambda })
    }
}

/// Pucci extremal operators over `S_{lambda,Lambda} = {A : lambda I <= A <= Lambda I}`:
///
/// `P+(X) = max -Tr(AX) = Lambda * sum e_i^- - lambda * sum e_i^+`,
/// `P-(X) = min -Tr(AX) = -P+(-X)`,
///
/// where `e_i` are the eigenvalues of `X`.
pub fn pucci_extremal(sign: PucciSign, x: &SymMatrix, lambda: f64, big_lambda: f64) -> Result<f64> {
    let e = Ellipticity::new(lambda, big_lambda)?;
    Ok(pucci(sign, x, e))
}

pub(crate) fn pucci(sign: PucciSign, x: &SymMatrix, e: Ellipticity) -> f64 {
    let (eig, n) = x.eigenvalues();
    let mut out = 0.0;
    for &v in &eig[..n] {
        out += match sign {
            // v > 0 pairs with the smallest admissible weight for the max
            PucciSign::Plus => {
                if v > 0.0 {
                    -e.lambda * v
                } else {
                    -e.big_lambda * v
                }
            }
            PucciSign::Minus => {
                if v > 0.0 {
                    -e.big_lambda * v
                } else {
                    -e.lambda * v
                }
            }
        };
    }
    out
}

/// Extremal weight for a single second difference `d` inside the discrete
/// Pucci operator: `max(-lambda d, -Lambda d)` for `P+`, the min for `P-`.
pub(crate) fn extremal_weight(sign: PucciSign, d: f64, e: Ellipticity) -> f64 {
    match (sign, d > 0.0) {
        (PucciSign::Plus, true) | (PucciSign::Minus, false) => e.lambda,
        (PucciSign::Plus, false) | (PucciSign::Minus, true) => e.big_lambda,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_constants_collapse_to_trace() {
        let x = SymMatrix::diag(&[2.0, -1.0]);
        assert_eq!(pucci_extremal(PucciSign::Plus, &x, 1.0, 1.0).unwrap(), -1.0);
        assert_eq!(pucci_extremal(PucciSign::Minus, &x, 1.0, 1.0).unwrap(), -1.0);
    }

    #[test]
    fn indefinite_diagonal() {
        let x = SymMatrix::diag(&[1.0, -1.0]);
        assert_eq!(pucci_extremal(PucciSign::Plus, &x, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(pucci_extremal(PucciSign::Minus, &x, 1.0, 2.0).unwrap(), -1.0);
    }

    #[test]
    fn identity_forces_extreme_matrices() {
        let x = SymMatrix::identity(2);
        assert_eq!(pucci_extremal(PucciSign::Plus, &x, 1.0, 3.0).unwrap(), -2.0);
        assert_eq!(pucci_extremal(PucciSign::Minus, &x, 1.0, 3.0).unwrap(), -6.0);
    }

    #[test]
    fn rejects_bad_constants() {
        let x = SymMatrix::identity(1);
        assert!(pucci_extremal(PucciSign::Plus, &x, 2.0, 1.0).is_err());
        assert!(pucci_extremal(PucciSign::Plus, &x, 0.0, 1.0).is_err());
    }
}
