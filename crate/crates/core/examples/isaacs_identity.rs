//! The obstacle equation as a two-player game: `min(max(a, b), c)` equals the
//! min-max of a bilinear payoff over `alpha, beta` in `[0, 1]`, and the optimal
//! policy names the active regime.

use obstacle::operators::{minmax_reduction, minmax_with, TieBreak};
use obstacle::scenario::{grid_oracle, identity_summary};

fn main() {
    for (a, b, c) in [(0.3, -0.1, 0.5), (0.3, 0.7, 0.5), (0.9, 0.2, -0.4), (0.0, 0.0, 0.0)] {
        let m = minmax_reduction(a, b, c);
        println!(
            "a={a:5.2} b={b:5.2} c={c:5.2} -> value {:5.2} (alpha {}, beta {}, {:>5}), grid oracle {:5.2}",
            m.value,
            m.alpha,
            m.beta,
            m.regime().as_str(),
            grid_oracle(a, b, c, 20)
        );
    }
    let tie = minmax_with(0.0, 0.0, 0.0, TieBreak::PreferContact);
    println!("all-zero triple with contact-first ties -> {}", tie.regime().as_str());

    let s = identity_summary(100_000, 42);
    println!(
        "{} draws ({} with ties): {} closed-form, {} grid and {} policy mismatches, max grid difference {:.1e}",
        s.draws, s.tied_draws, s.closed_form_mismatches, s.grid_mismatches, s.policy_mismatches, s.max_grid_difference
    );
}
