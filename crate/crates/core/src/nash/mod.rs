//! Exact equilibria of zero-sum matrix games and the local stability
//! certificate for accurate multiplicative weights dynamics.

mod lp;
pub mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::MatrixGame;
use crate::metrics::exploitability;
use crate::strategy::Strategy;

pub use spectral::{amwu_update_map, gelfand_spectral_radius, jacobian_at, spectral_radius_at_ne, DynPoint};

/// Largest duality gap accepted from the solver.
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashSolution {
    /// Maximizer's equilibrium strategy.
    pub f_star: Strategy,
    /// Minimizer's equilibrium strategy.
    pub y_star: Strategy,
    pub value: f64,
    /// Exploitability of `(f_star, y_star)`.
    pub gap: f64,
}

/// Solves `max_f min_y f^T A y` by linear programming.
///
/// Payoffs are shifted by `1 - min A` so every entry is at least one. The
/// column player's program `max 1^T w s.t. A' w <= 1` then has the origin as a
/// feasible basis, its optimum is `1 / v'`, and its multipliers give the row
/// player's strategy. If the certified gap exceeds [`GAP_TOL`] the basis is
/// searched again on a slightly perturbed right-hand side.
pub fn solve_zero_sum(game: &MatrixGame) -> Result<NashSolution> {
    let (rows, cols) = (game.rows(), game.cols());
    let (lo, _) = game.entry_range();
    let shift = 1.0 - lo;
    let shifted: Vec<f64> = game.entries().iter().map(|a| a + shift).collect();
    let ones = vec![1.0; rows];

    let first = lp::solve_packing(&shifted, rows, cols, &ones).and_then(|s| certify(game, s));
    let first_gap = match first {
        Ok(sol) if sol.gap <= GAP_TOL => return Ok(sol),
        Ok(sol) => sol.gap,
        Err(_) => f64::INFINITY,
    };
    let mut best_gap = first_gap;
    for attempt in 1..=3 {
        let scale = 1e-7 * attempt as f64;
        let perturbed: Vec<f64> = (0..rows).map(|i| 1.0 + scale * ((i + 1) as f64 / rows as f64)).collect();
        if let Ok(sol) =
            lp::solve_packing_with_basis_of(&shifted, rows, cols, &ones, &perturbed).and_then(|s| certify(game, s))
        {
            if sol.gap <= GAP_TOL {
                return Ok(sol);
            }
            best_gap = best_gap.min(sol.gap);
        }
    }
    Err(Error::SolverFailure { gap: best_gap })
}

fn certify(game: &MatrixGame, sol: lp::PackingSolution) -> Result<NashSolution> {
    let f_star = Strategy::from_unnormalized(sol.dual)?;
    let y_star = Strategy::from_unnormalized(sol.primal)?;
    let gap = exploitability(game, &f_star, &y_star)?;
    let value = game.value_at(&f_star, &y_star)?;
    Ok(NashSolution { f_star, y_star, value, gap })
}
