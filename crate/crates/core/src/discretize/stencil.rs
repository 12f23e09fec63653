use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::operators::{extremal_weight, Ellipticity, LinearCoefficients, OperatorKind, OperatorSpec, PucciSign};

/// Lattice directions of the 9-point stencil: the two axes, then the two diagonals.
pub const DIRECTIONS: [[isize; 2]; 4] = [[1, 0], [0, 1], [1, 1], [1, -1]];

/// Linearization of one residual row on the 3x3 neighborhood of a node,
/// indexed by `(di + 1) * 3 + (dj + 1)`; slot 4 is the node itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Row {
    pub coef: [f64; 9],
}

impl Row {
    #[inline]
    pub fn slot(offset: [isize; 2]) -> usize {
        ((offset[0] + 1) * 3 + (offset[1] + 1)) as usize
    }

    #[inline]
    fn add(&mut self, offset: [isize; 2], c: f64) {
        self.coef[Self::slot(offset)] += c;
    }

    pub fn center(&self) -> f64 {
        self.coef[4]
    }

    fn scaled_add(&mut self, other: &Row, t: f64) {
        for (a, b) in self.coef.iter_mut().zip(other.coef) {
            *a += t * b;
        }
    }
}

fn neg(o: [isize; 2]) -> [isize; 2] {
    [-o[0], -o[1]]
}

/// `(u(x + h d) - 2 u(x) + u(x - h d)) / |h d|^2`, the second derivative of `u`
/// along the unit vector of the physical displacement `h d`.
pub fn directional_second_difference(u: &ScalarField, node: usize, direction: [isize; 2]) -> Result<f64> {
    let grid = u.grid();
    if node >= grid.len() {
        return Err(Error::NodeOutOfRange { node, len: grid.len() });
    }
    if grid.dim() == 1 && direction[1] != 0 {
        return Err(Error::MissingNeighbor { node, direction });
    }
    let missing = Error::MissingNeighbor { node, direction };
    let up = grid.neighbor(node, direction).ok_or(missing.clone())?;
    let down = grid.neighbor(node, neg(direction)).ok_or(missing)?;
    let v = u.values();
    Ok((v[up] - 2.0 * v[node] + v[down]) * inverse_length_sq(grid, direction))
}

fn inverse_length_sq(grid: &Grid, d: [isize; 2]) -> f64 {
    let h = grid.spacing();
    let mut l2 = (d[0] as f64 * h[0]).powi(2);
    if grid.dim() == 2 {
        l2 += (d[1] as f64 * h[1]).powi(2);
    }
    1.0 / l2
}

/// Second-order weights per direction and drift of one linear operator at a node.
#[derive(Debug, Clone, Copy, Default)]
struct LinearStencil {
    second: [f64; 4],
    drift: [f64; 2],
}

#[derive(Debug, Clone)]
enum Scheme {
    /// One or more linear members per node; more than one means a Bellman max.
    Linear { members: usize, stencils: Vec<LinearStencil> },
    Pucci { sign: PucciSign, ellipticity: Ellipticity, mu: Vec<f64> },
}

/// Monotone finite-difference realization `F_h[u](x)` of an operator on a grid.
///
/// Linear operators use the axes, plus the diagonal matching the sign of
/// `a12`, with nonnegative weights; drifts are upwinded. Pucci operators take
/// `{lambda, Lambda}` weights per direction and the extremum over the two
/// orthogonal direction pairs (axes, diagonals); the gradient term uses the
/// monotone upwind magnitude. Every residual row is nonincreasing in the
/// neighbor values.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    scheme: Scheme,
    inv_l2: [f64; 4],
    scale: f64,
}

impl DiscreteOperator {
    pub fn new(spec: &OperatorSpec, grid: &Grid) -> Result<Self> {
        if spec.dim() != grid.dim() {
            return Err(Error::Dimension { expected: grid.dim(), got: spec.dim() });
        }
        let n = grid.dim();
        let mut inv_l2 = [0.0; 4];
        for (slot, d) in inv_l2.iter_mut().zip(DIRECTIONS) {
            if n == 2 || d[1] == 0 {
                *slot = inverse_length_sq(grid, d);
            }
        }
        let coords = |k: usize| grid.coords(k);
        let scheme = match spec.kind() {
            OperatorKind::Custom(_) => return Err(Error::CustomOperator),
            OperatorKind::Linear(c) => Scheme::Linear {
                members: 1,
                stencils: (0..grid.len())
                    .map(|k| linear_stencil(c, &coords(k)[..n], grid, k))
                    .collect::<Result<_>>()?,
            },
            OperatorKind::BellmanMax(members) => {
                let mut stencils = Vec::with_capacity(grid.len() * members.len());
                for k in 0..grid.len() {
                    for c in members {
                        stencils.push(linear_stencil(c, &coords(k)[..n], grid, k)?);
                    }
                }
                Scheme::Linear { members: members.len(), stencils }
            }
            OperatorKind::PucciPlus { mu } | OperatorKind::PucciMinus { mu } => {
                let h = grid.spacing();
                if n == 2 && (h[0] - h[1]).abs() > 1e-9 * h[0] {
                    return Err(Error::NonMonotone(
                        "the diagonal direction pair of the Pucci stencil needs equal spacing".into(),
                    ));
                }
                let sign = if matches!(spec.kind(), OperatorKind::PucciPlus { .. }) {
                    PucciSign::Plus
                } else {
                    PucciSign::Minus
                };
                let mu: Vec<f64> = (0..grid.len()).map(|k| mu.eval(&coords(k)[..n])).collect();
                if let Some(k) = mu.iter().position(|&m| m < 0.0) {
                    return Err(Error::ProblemData { constraint: "mu >= 0", node: k });
                }
                Scheme::Pucci { sign, ellipticity: spec.ellipticity(), mu }
            }
        };
        let big_lambda = spec.ellipticity().big_lambda;
        let scale = big_lambda * grid.spacing().iter().map(|h| 2.0 / (h * h)).sum::<f64>();
        Ok(DiscreteOperator { grid: *grid, scheme, inv_l2, scale })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Fixed positive row scale `Lambda * sum 2/h_a^2`, the size of the
    /// stencil's diagonal. Dividing equation rows by it puts them in units of `u`.
    pub fn row_scale(&self) -> f64 {
        self.scale
    }

    /// Directions used by the scheme.
    pub fn directions(&self) -> &'static [[isize; 2]] {
        if self.grid.dim() == 1 {
            &DIRECTIONS[..1]
        } else {
            &DIRECTIONS
        }
    }

    /// `F_h[u](x_k)` at an interior node.
    pub fn apply(&self, u: &[f64], k: usize) -> f64 {
        self.evaluate(u, k, None)
    }

    /// `F_h[u](x_k)` and its (generalized) derivative with respect to the
    /// 3x3 neighborhood values.
    pub fn linearize(&self, u: &[f64], k: usize) -> (f64, Row) {
        let mut row = Row::default();
        let v = self.evaluate(u, k, Some(&mut row));
        (v, row)
    }

    fn gather(&self, u: &[f64], k: usize) -> [f64; 9] {
        let mut nb = [0.0; 9];
        let dj = if self.grid.dim() == 2 { 1 } else { 0 };
        for di in -1..=1isize {
            for dj in -dj..=dj {
                if let Some(l) = self.grid.neighbor(k, [di, dj]) {
                    nb[Row::slot([di, dj])] = u[l];
                }
            }
        }
        nb
    }

    fn evaluate(&self, u: &[f64], k: usize, mut row: Option<&mut Row>) -> f64 {
        let nb = self.gather(u, k);
        let n = self.grid.dim();
        let dirs = self.directions();
        let mut second = [0.0; 4];
        for (i, d) in dirs.iter().enumerate() {
            second[i] = (nb[Row::slot(*d)] + nb[Row::slot(neg(*d))] - 2.0 * nb[4]) * self.inv_l2[i];
        }
        let h = self.grid.spacing();
        match &self.scheme {
            Scheme::Linear { members, stencils } => {
                let mut best = f64::NEG_INFINITY;
                let mut best_row = Row::default();
                for s in &stencils[k * members..(k + 1) * members] {
                    let mut r = Row::default();
                    let mut value = 0.0;
                    for (i, d) in dirs.iter().enumerate() {
                        let w = s.second[i];
                        if w != 0.0 {
                            value -= w * second[i];
                            add_second(&mut r, *d, -w * self.inv_l2[i]);
                        }
                    }
                    for a in 0..n {
                        let b = s.drift[a];
                        let e = axis(a);
                        if b > 0.0 {
                            value += b * (nb[4] - nb[Row::slot(neg(e))]) / h[a];
                            r.add([0, 0], b / h[a]);
                            r.add(neg(e), -b / h[a]);
                        } else if b < 0.0 {
                            value += b * (nb[Row::slot(e)] - nb[4]) / h[a];
                            r.add([0, 0], -b / h[a]);
                            r.add(e, b / h[a]);
                        }
                    }
                    if value > best {
                        best = value;
                        best_row = r;
                    }
                }
                if let Some(row) = row.as_deref_mut() {
                    *row = best_row;
                }
                best
            }
            Scheme::Pucci { sign, ellipticity, mu } => {
                let pairs: &[&[usize]] = if n == 1 { &[&[0]] } else { &[&[0, 1], &[2, 3]] };
                let mut best: Option<(f64, usize)> = None;
                for (pi, pair) in pairs.iter().enumerate() {
                    let v: f64 = pair
                        .iter()
                        .map(|&i| -extremal_weight(*sign, second[i], *ellipticity) * second[i])
                        .sum();
                    let better = match (best, sign) {
                        (None, _) => true,
                        (Some((b, _)), PucciSign::Plus) => v > b,
                        (Some((b, _)), PucciSign::Minus) => v < b,
                    };
                    if better {
                        best = Some((v, pi));
                    }
                }
                let (mut value, pi) = best.expect("at least one direction pair");
                if let Some(row) = row.as_deref_mut() {
                    for &i in pairs[pi] {
                        let w = extremal_weight(*sign, second[i], *ellipticity);
                        add_second(row, dirs[i], -w * self.inv_l2[i]);
                    }
                }
                let m = mu[k];
                if m > 0.0 {
                    let mut parts = [0.0; 2];
                    let mut branch = [(0.0, [0isize; 2]); 2];
                    for a in 0..n {
                        let e = axis(a);
                        let back = (nb[4] - nb[Row::slot(neg(e))]) / h[a];
                        let fwd = (nb[Row::slot(e)] - nb[4]) / h[a];
                        // (value, neighbor whose coefficient is -sign/h)
                        let cands = match sign {
                            PucciSign::Plus => [(back, neg(e)), (-fwd, e)],
                            PucciSign::Minus => [(fwd, e), (-back, neg(e))],
                        };
                        let (best_val, best_nb) = if cands[0].0 >= cands[1].0 { cands[0] } else { cands[1] };
                        if best_val > 0.0 {
                            parts[a] = best_val;
                            branch[a] = (1.0 / h[a], best_nb);
                        }
                    }
                    let norm = (parts[0] * parts[0] + parts[1] * parts[1]).sqrt();
                    let s = match sign {
                        PucciSign::Plus => 1.0,
                        PucciSign::Minus => -1.0,
                    };
                    value += s * m * norm;
                    if let (Some(row), true) = (row.as_deref_mut(), norm > 0.0) {
                        let mut g = Row::default();
                        for a in 0..n {
                            if parts[a] > 0.0 {
                                let (inv_h, nbo) = branch[a];
                                let w = parts[a] / norm * inv_h;
                                // Plus: d(u0 - u_nb); Minus: d(u_nb - u0)
                                g.add([0, 0], s * w);
                                g.add(nbo, -s * w);
                            }
                        }
                        row.scaled_add(&g, s * m);
                    }
                }
                value
            }
        }
    }
}

fn axis(a: usize) -> [isize; 2] {
    if a == 0 {
        [1, 0]
    } else {
        [0, 1]
    }
}

fn add_second(row: &mut Row, d: [isize; 2], c: f64) {
    row.add(d, c);
    row.add(neg(d), c);
    row.add([0, 0], -2.0 * c);
}

fn linear_stencil(c: &LinearCoefficients, x: &[f64], grid: &Grid, k: usize) -> Result<LinearStencil> {
    let n = grid.dim();
    let m = c.matrix(x, n);
    let drift = c.drift(x, n);
    let mut s = LinearStencil { drift, ..Default::default() };
    if n == 1 {
        s.second[0] = m.xx();
    } else {
        let h = grid.spacing();
        let (a11, a12, a22) = (m.xx(), m.xy(), m.yy());
        let l2 = h[0] * h[0] + h[1] * h[1];
        let diag_weight = a12.abs() * l2 / (h[0] * h[1]);
        s.second[0] = a11 - a12.abs() * h[0] / h[1];
        s.second[1] = a22 - a12.abs() * h[1] / h[0];
        if a12 > 0.0 {
            s.second[2] = diag_weight;
        } else if a12 < 0.0 {
            s.second[3] = diag_weight;
        }
    }
    if s.second.iter().any(|&w| w < 0.0) || !s.second.iter().chain(&s.drift).all(|w| w.is_finite()) {
        return Err(Error::NonMonotone(format!(
            "coefficients at node {k} are not diagonally dominant for this grid"
        )));
    }
    Ok(s)
}

/// `F_h[u]` at a single interior node.
pub fn discretize_operator(spec: &OperatorSpec, u: &ScalarField, node: usize) -> Result<f64> {
    let grid = u.grid();
    if node >= grid.len() {
        return Err(Error::NodeOutOfRange { node, len: grid.len() });
    }
    if grid.is_boundary(node) {
        return Err(Error::MissingNeighbor { node, direction: [0, 0] });
    }
    let op = DiscreteOperator::new(spec, grid)?;
    Ok(op.apply(u.values(), node))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{eval_operator, Coefficient, SymMatrix};

    #[test]
    fn second_difference_is_exact_on_quadratics() {
        let g = Grid::square(-1.0, 1.0, 9).unwrap();
        let u = ScalarField::from_fn(g, |x| x[0] * x[0] + 3.0 * x[1]).unwrap();
        let k = g.index([3, 5]);
        assert!((directional_second_difference(&u, k, [1, 0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(directional_second_difference(&u, k, [0, 1]).unwrap().abs() < 1e-12);
        let w = ScalarField::from_fn(g, |x| x[0] * x[1]).unwrap();
        assert!((directional_second_difference(&w, k, [1, 1]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_neighbor_is_flagged() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        let u = ScalarField::constant(g, 0.0).unwrap();
        assert!(matches!(
            directional_second_difference(&u, 0, [1, 0]),
            Err(Error::MissingNeighbor { .. })
        ));
    }

    #[test]
    fn one_dimensional_laplacian_stencil() {
        let g = Grid::interval(0.0, 1.0, 5).unwrap();
        let op = DiscreteOperator::new(&OperatorSpec::laplacian(1), &g).unwrap();
        let (_, row) = op.linearize(&[0.0; 5], 2);
        let h2 = 0.25f64 * 0.25;
        assert_eq!(row.coef[Row::slot([-1, 0])], -1.0 / h2);
        assert_eq!(row.coef[4], 2.0 / h2);
        assert_eq!(row.coef[Row::slot([1, 0])], -1.0 / h2);
    }

    #[test]
    fn isotropic_pucci_on_paraboloid() {
        let g = Grid::square(-1.0, 1.0, 11).unwrap();
        let spec = OperatorSpec::pucci_plus(2, 1.0, 1.0, 0.0).unwrap();
        let u = ScalarField::from_fn(g, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let op = DiscreteOperator::new(&spec, &g).unwrap();
        for k in g.interior_nodes() {
            assert!((op.apply(u.values(), k) + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_term_on_linear_function() {
        let g = Grid::square(-1.0, 1.0, 11).unwrap();
        let mu = 0.7;
        let u = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let plus = DiscreteOperator::new(&OperatorSpec::pucci_plus(2, 1.0, 2.0, mu).unwrap(), &g).unwrap();
        let minus = DiscreteOperator::new(&OperatorSpec::pucci_minus(2, 1.0, 2.0, mu).unwrap(), &g).unwrap();
        let k = g.index([5, 5]);
        assert!((plus.apply(u.values(), k) - mu).abs() < 1e-12);
        assert!((minus.apply(u.values(), k) + mu).abs() < 1e-12);
    }

    #[test]
    fn linear_with_cross_term_matches_pointwise_operator() {
        let g = Grid::new(&[-1.0, -1.0], &[1.0, 1.0], &[11, 21]).unwrap();
        let coeffs = LinearCoefficients {
            a11: 2.0.into(),
            a12: (-0.4).into(),
            a22: 1.5.into(),
            b: [Coefficient::zero(), Coefficient::zero()],
        };
        let spec = OperatorSpec::new(2, OperatorKind::Linear(coeffs), 1.0, 3.0).unwrap();
        let x = SymMatrix::new2(0.3, -1.2, 2.0);
        let u = ScalarField::from_fn(g, |p| 0.5 * x.quadratic_form(p)).unwrap();
        let op = DiscreteOperator::new(&spec, &g).unwrap();
        let expected = eval_operator(&spec, &[0.0, 0.0], &[0.0, 0.0], &x).unwrap();
        for k in g.interior_nodes() {
            assert!((op.apply(u.values(), k) - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn linearization_reproduces_value_on_linear_schemes() {
        // F_h is positively homogeneous piecewise linear: F_h[u] = row . u
        let g = Grid::square(0.0, 1.0, 7).unwrap();
        let u: Vec<f64> = (0..g.len()).map(|k| ((k * 37 % 11) as f64).sin()).collect();
        for spec in [
            OperatorSpec::pucci_plus(2, 1.0, 3.0, 0.4).unwrap(),
            OperatorSpec::pucci_minus(2, 1.0, 3.0, 0.4).unwrap(),
        ] {
            let op = DiscreteOperator::new(&spec, &g).unwrap();
            for k in g.interior_nodes() {
                let (v, row) = op.linearize(&u, k);
                let mut dot = 0.0;
                for di in -1..=1 {
                    for dj in -1..=1 {
                        let l = g.neighbor(k, [di, dj]).unwrap();
                        dot += row.coef[Row::slot([di, dj])] * u[l];
                    }
                }
                assert!((dot - v).abs() < 1e-9 * (1.0 + v.abs()), "{k}: {dot} vs {v}");
            }
        }
    }

    #[test]
    fn rejects_custom_and_non_dominant() {
        let g = Grid::square(0.0, 1.0, 5).unwrap();
        let custom = OperatorSpec::custom(2, 1.0, 1.0, 0.0, |_, _, x| -x.trace()).unwrap();
        assert!(matches!(DiscreteOperator::new(&custom, &g), Err(Error::CustomOperator)));
        let coeffs = LinearCoefficients {
            a11: 1.0.into(),
            a12: 0.9.into(),
            a22: 0.5.into(),
            b: [Coefficient::zero(), Coefficient::zero()],
        };
        let skew = OperatorSpec::new(2, OperatorKind::Linear(coeffs), 0.1, 2.0).unwrap();
        assert!(matches!(DiscreteOperator::new(&skew, &g), Err(Error::NonMonotone(_))));
    }
}
