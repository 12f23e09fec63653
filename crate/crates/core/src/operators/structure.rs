use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pucci::{pucci, Ellipticity, PucciSign};
use super::spec::{eval_operator, OperatorSpec};
use super::SymMatrix;
use crate::error::Result;
use crate::grid::ScalarField;

/// Box half-width for sampled gradients and matrix entries.
const SAMPLE_SCALE: f64 = 10.0;
const MAX_WITNESSES: usize = 16;

/// A sampled tuple that violates one of the two structure inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub node: usize,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub x_matrix: SymMatrix,
    pub y_matrix: SymMatrix,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Largest sampled violation; `<= 0` means every sample passed.
    pub max_violation: f64,
    pub samples: usize,
    pub witnesses: Vec<Witness>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.max_violation <= 0.0
    }
}

/// Draws a symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> SymMatrix {
    if n == 1 {
        SymMatrix::new1(rng.gen_range(-scale..=scale))
    } else {
        SymMatrix::new2(
            rng.gen_range(-scale..=scale),
            rng.gen_range(-scale..=scale),
            rng.gen_range(-scale..=scale),
        )
    }
}

/// Samples the two-sided structure condition
///
/// `P-(X-Y) - mu|xi-eta| <= F(x,xi,X) - F(x,eta,Y) <= P+(X-Y) + mu|xi-eta|`
///
/// at random nodes of `mu`'s grid. Violations below the floating-point noise
/// of the terms involved are not counted.
pub fn check_structure_condition(
    spec: &OperatorSpec,
    lambda: f64,
    big_lambda: f64,
    mu: &ScalarField,
    samples: usize,
    seed: u64,
) -> Result<StructureReport> {
    let e = Ellipticity::new(lambda, big_lambda)?;
    let n = spec.dim();
    let grid = mu.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StructureReport {
        max_violation: f64::NEG_INFINITY,
        samples: samples.max(1),
        witnesses: Vec::new(),
    };
    for s in 0..report.samples {
        let node = rng.gen_range(0..grid.len());
        let x = &grid.coords(node)[..n];
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_SCALE..=SAMPLE_SCALE)).collect();
        let xm = random_symmetric(&mut rng, n, SAMPLE_SCALE);
        // every eighth sample compares a tuple with itself
        let (eta, ym) = if s % 8 == 7 {
            (xi.clone(), xm)
        } else {
            let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-SAMPLE_SCALE..=SAMPLE_SCALE)).collect();
            (eta, random_symmetric(&mut rng, n, SAMPLE_SCALE))
        };
        let fx = eval_operator(spec, x, &xi, &xm)?;
        let fy = eval_operator(spec, x, &eta, &ym)?;
        let diff = fx - fy;
        let gap = xi.iter().zip(&eta).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let grad = mu.get(node) * gap;
        let upper = pucci(PucciSign::Plus, &(xm - ym), e) + grad;
        let lower = pucci(PucciSign::Minus, &(xm - ym), e) - grad;
        let noise = 64.0 * f64::EPSILON * (fx.abs() + fy.abs() + upper.abs() + lower.abs() + 1.0);
        let violation = (diff - upper).max(lower - diff) - noise;
        if violation > report.max_violation {
            report.max_violation = violation;
        }
        if violation > 0.0 && report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness {
                node,
                xi,
                eta,
                x_matrix: xm,
                y_matrix: ym,
                violation,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::operators::spec::{Coefficient, LinearCoefficients, OperatorKind};

    fn mu_field(c: f64) -> ScalarField {
        ScalarField::constant(Grid::square(-1.0, 1.0, 9).unwrap(), c).unwrap()
    }

    #[test]
    fn elliptic_linear_operator_passes() {
        let coeffs = LinearCoefficients {
            a11: Coefficient::function(|x| 1.5 + 0.4 * x[0]),
            a12: Coefficient::function(|x| 0.2 * x[1]),
            a22: 1.5.into(),
            b: [0.3.into(), Coefficient::function(|x| -0.4 * x[0])],
        };
        let spec = OperatorSpec::new(2, OperatorKind::Linear(coeffs), 1.0, 2.0).unwrap();
        let report = check_structure_condition(&spec, 1.0, 2.0, &mu_field(0.5), 4000, 3).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn over_elliptic_matrix_is_caught() {
        let spec = OperatorSpec::new(2, OperatorKind::Linear(LinearCoefficients::isotropic(3.0)), 1.0, 2.0).unwrap();
        let report = check_structure_condition(&spec, 1.0, 2.0, &mu_field(0.0), 1000, 1).unwrap();
        assert!(report.max_violation > 0.0);
        assert!(!report.witnesses.is_empty());
    }

    #[test]
    fn identical_arguments_have_zero_margin() {
        let spec = OperatorSpec::pucci_plus(2, 1.0, 2.0, 1.0).unwrap();
        let xm = SymMatrix::new2(1.0, 2.0, -3.0);
        let d = eval_operator(&spec, &[0.0, 0.0], &[1.0, 1.0], &xm).unwrap()
            - eval_operator(&spec, &[0.0, 0.0], &[1.0, 1.0], &xm).unwrap();
        assert_eq!(d, 0.0);
        let zero = SymMatrix::zero(2);
        let e = Ellipticity::new(1.0, 2.0).unwrap();
        assert_eq!(pucci(PucciSign::Plus, &zero, e), 0.0);
        assert_eq!(pucci(PucciSign::Minus, &zero, e), 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let spec = OperatorSpec::pucci_minus(2, 1.0, 3.0, 0.5).unwrap();
        let a = check_structure_condition(&spec, 1.0, 3.0, &mu_field(0.5), 200, 9).unwrap();
        let b = check_structure_condition(&spec, 1.0, 3.0, &mu_field(0.5), 200, 9).unwrap();
        assert_eq!(a, b);
    }
}
