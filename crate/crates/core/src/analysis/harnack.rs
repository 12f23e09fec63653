use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ExponentSet;
use crate::grid::ScalarField;
use crate::norms::lp_quasinorm;

/// Which inequality a probe measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    /// `||v||_{L^eps0(B_r)} / (r^{n/eps0} (inf_{B_r} v + r^alpha0 ||f||_{L^{p^n}(B_2r)}))`.
    WeakHarnack,
    /// `sup_{B_{r/2}} u / (r^{-n/eps0} ||u||_{L^eps0(B_r)} + r^alpha0 ||f^+||_{L^{p^n}(B_2r)})`.
    LocalMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnackProbe {
    pub mode: ProbeMode,
    pub r: f64,
    pub eps0: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `numerator / denominator`; `None` when the denominator vanishes.
    pub ratio: Option<f64>,
    /// Weak Harnack only: the infimum on `B_r` is zero while the field is not,
    /// so the ratio is governed by the data term alone.
    pub tight: bool,
}

fn check(v: &ScalarField, f: &ScalarField, center: &[f64], r: f64, eps0: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    v.same_grid(f)?;
    let grid = v.grid();
    if center.len() != grid.dim() {
        return Err(Error::Dimension { expected: grid.dim(), got: center.len() });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRadius(r));
    }
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::NonPositiveExponent(eps0));
    }
    if 2.0 * r > grid.distance_to_boundary(center) + 1e-9 * grid.min_spacing() {
        return Err(Error::BallOutsideDomain { radius: 2.0 * r });
    }
    let ball = grid.ball(center, r);
    let double = grid.ball(center, 2.0 * r);
    if ball.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok((ball, double))
}

/// Weak Harnack ratio of a nonnegative supersolution `v` on `B_r(center)`.
pub fn harnack_probe(
    v: &ScalarField,
    f: &ScalarField,
    center: &[f64],
    r: f64,
    eps0: f64,
    exponents: &ExponentSet,
) -> Result<HarnackProbe> {
    let (ball, double) = check(v, f, center, r, eps0)?;
    if let Some(&k) = double.iter().find(|&&k| v.get(k) < 0.0) {
        return Err(Error::ProblemData { constraint: "nonnegativity of the probed field", node: k });
    }
    let n = v.grid().dim() as f64;
    let numerator = lp_quasinorm(v, eps0, &ball)?;
    let inf = ball.iter().map(|&k| v.get(k)).fold(f64::INFINITY, f64::min);
    let data = r.powf(exponents.alpha0) * lp_quasinorm(f, exponents.data_exponent(), &double)?;
    let denominator = r.powf(n / eps0) * (inf + data);
    Ok(HarnackProbe {
        mode: ProbeMode::WeakHarnack,
        r,
        eps0,
        numerator,
        denominator,
        ratio: (denominator > 0.0).then(|| numerator / denominator),
        tight: inf == 0.0 && numerator > 0.0,
    })
}

/// Local maximum principle ratio of a nonnegative subsolution `u`.
pub fn local_max_probe(
    u: &ScalarField,
    f: &ScalarField,
    center: &[f64],
    r: f64,
    eps0: f64,
    exponents: &ExponentSet,
) -> Result<HarnackProbe> {
    let (ball, double) = check(u, f, center, r, eps0)?;
    let grid = u.grid();
    let n = grid.dim() as f64;
    let half = grid.ball(center, 0.5 * r);
    let numerator = half.iter().map(|&k| u.get(k)).fold(f64::NEG_INFINITY, f64::max);
    let positive = f.map(|x| x.max(0.0))?;
    let denominator = r.powf(-n / eps0) * lp_quasinorm(u, eps0, &ball)?
        + r.powf(exponents.alpha0) * lp_quasinorm(&positive, exponents.data_exponent(), &double)?;
    Ok(HarnackProbe {
        mode: ProbeMode::LocalMax,
        r,
        eps0,
        numerator,
        denominator,
        ratio: (denominator > 0.0).then(|| numerator / denominator),
        tight: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::compute_exponents;
    use crate::grid::Grid;

    #[test]
    fn constant_field_gives_ball_volume_power() {
        let grid = Grid::square(-1.0, 1.0, 65).unwrap();
        let e = compute_exponents(2, 3.0, 3.0, 0.5).unwrap();
        let zero = ScalarField::constant(grid, 0.0).unwrap();
        let mut ratios = Vec::new();
        for (c, r) in [(1.0, 0.25), (7.0, 0.25), (2.0, 0.5)] {
            let v = ScalarField::constant(grid, c).unwrap();
            let p = harnack_probe(&v, &zero, &[0.0, 0.0], r, 0.5, &e).unwrap();
            let discrete_volume = grid.ball(&[0.0, 0.0], r).len() as f64 * grid.cell_volume() / (r * r);
            assert!((p.ratio.unwrap() - discrete_volume.powf(2.0)).abs() < 1e-9 * p.ratio.unwrap());
            ratios.push(p.ratio.unwrap());
        }
        assert!((ratios[0] - ratios[1]).abs() < 1e-12 * ratios[0]);
        assert!((ratios[2] / std::f64::consts::PI.powi(2) - 1.0).abs() < 0.05);
    }

    #[test]
    fn tent_with_zero_infimum_is_tight() {
        let grid = Grid::interval(-1.0, 1.0, 129).unwrap();
        let e = compute_exponents(1, 2.0, 2.0, 0.5).unwrap();
        let v = ScalarField::from_fn(grid, |x| x[0].abs()).unwrap();
        let zero = ScalarField::constant(grid, 0.0).unwrap();
        let p = harnack_probe(&v, &zero, &[0.0], 0.25, 0.5, &e).unwrap();
        assert!(p.tight);
        assert_eq!(p.ratio, None);
        let f = ScalarField::constant(grid, 1e-6).unwrap();
        let p = harnack_probe(&v, &f, &[0.0], 0.25, 0.5, &e).unwrap();
        assert!(p.tight && p.ratio.unwrap() > 1e3);
    }

    #[test]
    fn negative_values_are_rejected() {
        let grid = Grid::interval(-1.0, 1.0, 33).unwrap();
        let e = compute_exponents(1, 2.0, 2.0, 0.5).unwrap();
        let v = ScalarField::from_fn(grid, |x| x[0]).unwrap();
        assert!(harnack_probe(&v, &v, &[0.0], 0.25, 0.5, &e).is_err());
    }
}
