use serde::{Deserialize, Serialize};

/// Which of the three equations is active at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `F - f = 0`.
    Pde,
    /// `u = psi`.
    Upper,
    /// `u = phi`.
    Lower,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Pde => "pde",
            Regime::Upper => "upper",
            Regime::Lower => "lower",
        }
    }
}

/// Value and extreme-point optimizers of
/// `min_{alpha in [0,1]} max_{beta in [0,1]} [alpha beta a + alpha (1-beta) b + (1-alpha) c]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub value: f64,
    pub alpha: u8,
    pub beta: u8,
}

impl MinMax {
    /// `alpha = 0` selects the lower obstacle, `(1, 0)` the upper one and
    /// `(1, 1)` the equation.
    pub fn regime(&self) -> Regime {
        match (self.alpha, self.beta) {
            (0, _) => Regime::Lower,
            (_, 0) => Regime::Upper,
            _ => Regime::Pde,
        }
    }
}

/// Tie-breaking between equal branches of the min-max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Ties go to `alpha = 1`, then `beta = 1`.
    #[default]
    PreferEquation,
    /// Ties go to `alpha = 0`, then `beta = 0`.
    PreferContact,
}

impl TieBreak {
    pub fn as_str(&self) -> &'static str {
        match self {
            TieBreak::PreferEquation => "prefer_equation",
            TieBreak::PreferContact => "prefer_contact",
        }
    }
}

/// `min(max(a, b), c)` with its optimal policy, ties toward `alpha = 1` then `beta = 1`.
///
/// The affine objective is linear in each variable, so extreme points suffice:
/// for `alpha > 0` the inner max picks `beta = 1` iff `a >= b`, leaving
/// `alpha max(a,b) + (1-alpha) c`, minimized at `alpha = 1` iff `max(a,b) <= c`.
pub fn minmax_reduction(a: f64, b: f64, c: f64) -> MinMax {
    minmax_with(a, b, c, TieBreak::PreferEquation)
}

pub fn minmax_with(a: f64, b: f64, c: f64, tie: TieBreak) -> MinMax {
    let (beta, inner) = match tie {
        TieBreak::PreferEquation => if a >= b { (1, a) } else { (0, b) },
        TieBreak::PreferContact => if b >= a { (0, b) } else { (1, a) },
    };
    let take_alpha = match tie {
        TieBreak::PreferEquation => inner <= c,
        TieBreak::PreferContact => inner < c,
    };
    if take_alpha {
        MinMax { value: inner, alpha: 1, beta }
    } else {
        // alpha = 0 makes beta irrelevant; report the tie-break choice
        let beta = match tie {
            TieBreak::PreferEquation => 1,
            TieBreak::PreferContact => 0,
        };
        MinMax { value: c, alpha: 0, beta }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_lower_obstacle() {
        let r = minmax_reduction(1.0, 2.0, 0.0);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.alpha, 0);
        assert_eq!(r.regime(), Regime::Lower);
    }

    #[test]
    fn degenerate_ties_prefer_equation() {
        let r = minmax_reduction(0.0, 0.0, 0.0);
        assert_eq!((r.value, r.alpha, r.beta), (0.0, 1, 1));
        let r = minmax_with(0.0, 0.0, 0.0, TieBreak::PreferContact);
        assert_eq!((r.value, r.alpha, r.beta), (0.0, 0, 0));
    }

    #[test]
    fn upper_and_equation_branches() {
        assert_eq!(minmax_reduction(-1.0, 0.5, 3.0).regime(), Regime::Upper);
        assert_eq!(minmax_reduction(0.5, -1.0, 3.0).regime(), Regime::Pde);
    }
}
