//! Banded direct elimination for the structured-grid Jacobians.

/// Square matrix with equal lower and upper bandwidth, stored row by row.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix { n, bw, data: vec![0.0; n * (2 * bw + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw, "({i},{j}) outside band {}", self.bw);
        i * (2 * self.bw + 1) + j + self.bw - i
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.at(i, j);
        self.data[idx] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.data[self.at(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw + 1).min(self.n);
                (lo..hi).map(|j| self.data[self.at(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b` in place by Gaussian elimination without pivoting,
    /// which is stable for the diagonally dominant matrices produced by
    /// monotone schemes. Returns the row of the first vanishing pivot on failure.
    pub fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>, usize> {
        let (n, bw) = (self.n, self.bw);
        let width = 2 * bw + 1;
        for k in 0..n {
            let pivot = self.data[k * width + bw];
            if !(pivot.abs() > 1e-300) || !pivot.is_finite() {
                return Err(k);
            }
            let last = (k + bw + 1).min(n);
            for i in (k + 1)..last {
                let ik = i * width + k + bw - i;
                let l = self.data[ik] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[ik] = 0.0;
                for j in (k + 1)..last {
                    let kj = k * width + j + bw - k;
                    let ij = i * width + j + bw - i;
                    self.data[ij] -= l * self.data[kj];
                }
                b[i] -= l * b[k];
            }
        }
        for k in (0..n).rev() {
            let last = (k + bw + 1).min(n);
            let mut s = b[k];
            for j in (k + 1)..last {
                s -= self.data[k * width + j + bw - k] * b[j];
            }
            b[k] = s / self.data[k * width + bw];
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let b = a.mul_vec(&x);
        let y = a.solve(b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn wide_band_nonsymmetric_solve() {
        let n = 40;
        let bw = 6;
        let mut a = BandMatrix::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 10.0);
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                if j != i {
                    a.add(i, j, -0.5 - 0.1 * ((i * 7 + j * 3) % 5) as f64 / 5.0);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 13.0).collect();
        let y = a.clone().solve(a.mul_vec(&x)).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10);
        }
        assert_eq!(a.get(0, n - 1), 0.0);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut a = BandMatrix::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(2, 2, 1.0);
        assert_eq!(a.solve(vec![1.0; 3]), Err(1));
    }
}
