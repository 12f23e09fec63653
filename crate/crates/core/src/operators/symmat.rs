use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Symmetric `n x n` matrix with `n` in {1, 2}, stored as its upper triangle
/// `(xx, xy, yy)`. In one dimension only `xx` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    entries: [f64; 3],
}

impl SymMatrix {
    pub fn new2(xx: f64, xy: f64, yy: f64) -> Self {
        SymMatrix { n: 2, entries: [xx, xy, yy] }
    }

    pub fn new1(xx: f64) -> Self {
        SymMatrix { n: 1, entries: [xx, 0.0, 0.0] }
    }

    pub fn diag(d: &[f64]) -> Self {
        match d {
            [a] => Self::new1(*a),
            [a, b] => Self::new2(*a, 0.0, *b),
            _ => panic!("SymMatrix supports dimensions 1 and 2, got {}", d.len()),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::identity(n) * 0.0
    }

    pub fn identity(n: usize) -> Self {
        match n {
            1 => Self::new1(1.0),
            2 => Self::new2(1.0, 0.0, 1.0),
            _ => panic!("SymMatrix supports dimensions 1 and 2, got {n}"),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn xx(&self) -> f64 {
        self.entries[0]
    }

    pub fn xy(&self) -> f64 {
        self.entries[1]
    }

    pub fn yy(&self) -> f64 {
        self.entries[2]
    }

    pub fn trace(&self) -> f64 {
        if self.n == 1 {
            self.entries[0]
        } else {
            self.entries[0] + self.entries[2]
        }
    }

    /// Eigenvalues in ascending order; the second slot is unused in 1D.
    ///
    /// Closed-form quadratic with the discriminant clamped at zero.
    pub fn eigenvalues(&self) -> ([f64; 2], usize) {
        if self.n == 1 {
            return ([self.entries[0], 0.0], 1);
        }
        let [a, b, c] = self.entries;
        let mean = 0.5 * (a + c);
        let half_gap = 0.5 * (a - c);
        let disc = (half_gap * half_gap + b * b).max(0.0).sqrt();
        ([mean - disc, mean + disc], 2)
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        let (e, n) = self.eigenvalues();
        e[..n].iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `d^T X d` for a vector of matching dimension.
    pub fn quadratic_form(&self, d: &[f64]) -> f64 {
        if self.n == 1 {
            self.entries[0] * d[0] * d[0]
        } else {
            let [a, b, c] = self.entries;
            a * d[0] * d[0] + 2.0 * b * d[0] * d[1] + c * d[1] * d[1]
        }
    }

    /// `Tr(A X)` for symmetric `A` of matching dimension.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        if self.n == 1 {
            self.entries[0] * other.entries[0]
        } else {
            self.entries[0] * other.entries[0]
                + 2.0 * self.entries[1] * other.entries[1]
                + self.entries[2] * other.entries[2]
        }
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(self, o: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.n, o.n);
        let mut e = self.entries;
        for (x, y) in e.iter_mut().zip(o.entries) {
            *x += y;
        }
        SymMatrix { n: self.n, entries: e }
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(self, o: SymMatrix) -> SymMatrix {
        self + (-o)
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self * -1.0
    }
}

impl Mul<f64> for SymMatrix {
    type Output = SymMatrix;
    fn mul(self, t: f64) -> SymMatrix {
        SymMatrix { n: self.n, entries: self.entries.map(|x| x * t) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_rotated_diagonal() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        // R diag(3, -1) R^T
        let m = SymMatrix::new2(3.0 * c * c - s * s, 4.0 * c * s, 3.0 * s * s - c * c);
        let (e, n) = m.eigenvalues();
        assert_eq!(n, 2);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        assert!((m.norm() - 3.0).abs() < 1e-14);
        assert!((m.trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_form_on_diagonal_direction() {
        let m = SymMatrix::new2(0.0, 1.0, 0.0);
        assert_eq!(m.quadratic_form(&[1.0, 1.0]), 2.0);
        assert_eq!(SymMatrix::new1(4.0).quadratic_form(&[0.5]), 1.0);
    }
}
