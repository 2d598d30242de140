//! Post-hoc measurements over recorded traces.
//!
//! Every regret series has one entry per round: entry `t - 1` is the
//! cumulative quantity after round `t`. Fixed and per-round comparators over
//! the simplex are pure strategies, since a linear objective is minimized at a
//! vertex.

pub mod bounds;

use crate::error::{Error, Result};
use crate::game::MatrixGame;
use crate::regularizer::Regularizer;
use crate::strategy::{check_len, distance, dot, kl_divergence, LossVector, Norm, Strategy};
use crate::trace::Trace;

/// Tolerance for the comparisons inside [`beta_close`].
pub const BETA_CLOSE_TOL: f64 = 1e-12;

pub type RegretSeries = Vec<f64>;

/// `sum_{s<=t} <f_s, x_s> - min_i sum_{s<=t} x_s(i)`.
pub fn external_regret(trace: &Trace) -> RegretSeries {
    let Some(first) = trace.rounds().first() else {
        return Vec::new();
    };
    let mut cumulative = vec![0.0; first.loss.len()];
    let mut realized = 0.0;
    trace
        .rounds()
        .iter()
        .map(|r| {
            realized += r.realized;
            for (c, x) in cumulative.iter_mut().zip(r.loss.as_slice()) {
                *c += x;
            }
            realized - cumulative.iter().copied().fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `sum_{s<=t} (<f_s, x_s> - min_i x_s(i))`.
pub fn dynamic_regret(trace: &Trace) -> RegretSeries {
    let mut acc = 0.0;
    trace
        .rounds()
        .iter()
        .map(|r| {
            // A rounding hair below zero would break monotonicity of the series.
            acc += (r.realized - r.loss.min()).max(0.0);
            acc
        })
        .collect()
}

/// `DR_t / t`.
pub fn average_dynamic_regret(trace: &Trace) -> Vec<f64> {
    dynamic_regret(trace).into_iter().enumerate().map(|(i, d)| d / (i + 1) as f64).collect()
}

/// Running mean of realized loss.
pub fn average_loss(trace: &Trace) -> Vec<f64> {
    let mut acc = 0.0;
    trace
        .rounds()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            acc += r.realized;
            acc / (i + 1) as f64
        })
        .collect()
}

/// One-step-lookahead leaders `g_t = argmin <g, sum_{s<=t} x_s> + R(g) / eta`.
pub fn forward_comparators(stream: &[LossVector], reg: Regularizer, eta: f64) -> Result<Vec<Strategy>> {
    let Some(first) = stream.first() else {
        return Ok(Vec::new());
    };
    let mut cumulative = vec![0.0; first.len()];
    let mut out = Vec::with_capacity(stream.len());
    for x in stream {
        check_len(cumulative.len(), x.len())?;
        for (c, v) in cumulative.iter_mut().zip(x.as_slice()) {
            *c += v;
        }
        out.push(reg.argmin(&cumulative, eta)?);
    }
    Ok(out)
}

/// `sum_{s<=t} (<f_s, x_s> - <g_s, x_s>)`; may be negative.
pub fn forward_regret(trace: &Trace, reg: Regularizer, eta: f64) -> Result<RegretSeries> {
    let comparators = forward_comparators(&trace.loss_stream(), reg, eta)?;
    let mut acc = 0.0;
    Ok(trace
        .rounds()
        .iter()
        .zip(&comparators)
        .map(|(r, g)| {
            acc += r.realized - dot(g.as_slice(), r.loss.as_slice());
            acc
        })
        .collect())
}

/// Duality gap `max_i (A y)_i - min_j (f^T A)_j` for the maximizer `f`.
pub fn exploitability(game: &MatrixGame, f: &Strategy, y: &Strategy) -> Result<f64> {
    let ay = game.row_payoffs(y)?;
    let fa = game.col_payoffs(f)?;
    let best_row = ay.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best_col = fa.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((best_row - best_col).max(0.0))
}

/// Every action either carries at most `beta` mass or earns within `beta` of
/// the current value, for both players.
pub fn beta_close(game: &MatrixGame, f: &Strategy, y: &Strategy, beta: f64) -> Result<bool> {
    let ay = game.row_payoffs(y)?;
    let fa = game.col_payoffs(f)?;
    let value = dot(f.as_slice(), &ay);
    let ok = |mass: &[f64], payoffs: &[f64]| {
        mass.iter()
            .zip(payoffs)
            .all(|(&p, &a)| p <= beta + BETA_CLOSE_TOL || (value - a).abs() <= beta + BETA_CLOSE_TOL)
    };
    Ok(ok(f.as_slice(), &ay) && ok(y.as_slice(), &fa))
}

/// `|f_{t+1} - f_t|` for consecutive strategies.
pub fn step_distances(trace: &Trace, norm: Norm) -> Vec<f64> {
    strategy_steps(trace.strategies(), norm)
}

pub fn strategy_steps<'a>(strategies: impl IntoIterator<Item = &'a Strategy>, norm: Norm) -> Vec<f64> {
    let v: Vec<&Strategy> = strategies.into_iter().collect();
    v.windows(2).map(|w| distance(w[1].as_slice(), w[0].as_slice(), norm)).collect()
}

/// `KL(f*, f_t) + KL(y*, y_t)` per round.
pub fn kl_series(max_trace: &Trace, min_trace: &Trace, reference: (&Strategy, &Strategy)) -> Result<Vec<f64>> {
    if max_trace.horizon() != min_trace.horizon() {
        return Err(Error::DimensionMismatch { expected: max_trace.horizon(), found: min_trace.horizon() });
    }
    max_trace
        .strategies()
        .zip(min_trace.strategies())
        .map(|(f, y)| Ok(kl_divergence(reference.0.as_slice(), f.as_slice())? + kl_divergence(reference.1.as_slice(), y.as_slice())?))
        .collect()
}

/// Per-round exploitability of the strategy pairs in two self-play traces.
pub fn exploitability_series(game: &MatrixGame, max_trace: &Trace, min_trace: &Trace) -> Result<Vec<f64>> {
    max_trace.strategies().zip(min_trace.strategies()).map(|(f, y)| exploitability(game, f, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(w: &[f64]) -> Strategy {
        Strategy::new(w.to_vec()).unwrap()
    }

    fn x(v: &[f64]) -> LossVector {
        LossVector::new(v.to_vec()).unwrap()
    }

    fn trace(rounds: &[(&[f64], &[f64])]) -> Trace {
        let mut t = Trace::new();
        for (f, l) in rounds {
            t.push(s(f), x(l)).unwrap();
        }
        t
    }

    fn pennies() -> MatrixGame {
        MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn regret_examples() {
        assert_eq!(external_regret(&trace(&[(&[0.5, 0.5], &[1.0, 0.0])])), vec![0.5]);
        let zero = trace(&[(&[0.5, 0.5], &[0.0, 0.0]), (&[1.0, 0.0], &[0.0, 0.0])]);
        assert_eq!(external_regret(&zero), vec![0.0, 0.0]);
        let two = trace(&[(&[0.5, 0.5], &[1.0, 0.0]), (&[0.5, 0.5], &[0.0, 1.0])]);
        assert_abs_diff_eq!(external_regret(&two)[1], 0.0);

        let hit = trace(&[(&[0.0, 1.0], &[1.0, 0.0]), (&[1.0, 0.0], &[0.0, 1.0])]);
        assert_eq!(dynamic_regret(&hit), vec![0.0, 0.0]);
        assert_abs_diff_eq!(dynamic_regret(&trace(&[(&[0.5, 0.5], &[0.2, 0.8])]))[0], 0.3, epsilon = 1e-15);
    }

    #[test]
    fn forward_examples() {
        let g = forward_comparators(&[x(&[0.0, 0.0]), x(&[0.0, 0.0])], Regularizer::Entropy, 1.0).unwrap();
        assert!(g.iter().all(|g| g.as_slice() == [0.5, 0.5]));

        let g = forward_comparators(&[x(&[1.0, 0.0])], Regularizer::Entropy, 1.0).unwrap();
        assert_abs_diff_eq!(g[0].weight(0), 0.268941421369995, epsilon = 1e-12);

        let stream = vec![x(&[0.3, 0.1, 0.6]); 3];
        let g = forward_comparators(&stream, Regularizer::Entropy, 0.7).unwrap();
        let direct = Regularizer::Entropy.argmin(&[0.9, 0.3, 1.8], 0.7).unwrap();
        for (a, b) in g[2].as_slice().iter().zip(direct.as_slice()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        let fr = forward_regret(&trace(&[(&[0.5, 0.5], &[1.0, 0.0])]), Regularizer::Entropy, 1.0).unwrap();
        assert_abs_diff_eq!(fr[0], 0.231058578630005, epsilon = 1e-12);
    }

    #[test]
    fn exploitability_examples() {
        let u = Strategy::uniform(2);
        assert_eq!(exploitability(&pennies(), &u, &u).unwrap(), 0.0);
        assert_eq!(exploitability(&pennies(), &s(&[1.0, 0.0]), &s(&[1.0, 0.0])).unwrap(), 2.0);
        let g = MatrixGame::from_rows(&[vec![3.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert_abs_diff_eq!(exploitability(&g, &s(&[0.25, 0.75]), &u).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_close_examples() {
        let u = Strategy::uniform(2);
        assert!(beta_close(&pennies(), &u, &u, 0.0).unwrap());
        let p = s(&[1.0, 0.0]);
        // Each action is compared with its own payoff: y_1 = 1 earns (A^T f)_1 = 1,
        // which equals the value f^T A y = 1.
        assert!(beta_close(&pennies(), &p, &p, 0.5).unwrap());
        // Against uniform y the value is 0 while y_1 = 0.5 earns 1.
        assert!(!beta_close(&pennies(), &p, &u, 0.4).unwrap());
        assert!(beta_close(&pennies(), &p, &s(&[0.3, 0.7]), 1.0).unwrap());
    }

    #[test]
    fn step_and_kl_examples() {
        let r: (&[f64], &[f64]) = (&[0.3, 0.7], &[0.0, 0.0]);
        let constant = trace(&[r; 3]);
        assert_eq!(step_distances(&constant, Norm::L1), vec![0.0, 0.0]);
        let alternating = trace(&[(&[1.0, 0.0], &[0.0, 0.0]), (&[0.0, 1.0], &[0.0, 0.0]), (&[1.0, 0.0], &[0.0, 0.0])]);
        assert_eq!(step_distances(&alternating, Norm::L1), vec![2.0, 2.0]);

        let f = trace(&[(&[0.5, 0.5], &[0.0, 0.0])]);
        let y = trace(&[(&[0.5, 0.5], &[0.0, 0.0])]);
        let series = kl_series(&f, &y, (&s(&[0.25, 0.75]), &s(&[0.5, 0.5]))).unwrap();
        assert_abs_diff_eq!(series[0], 0.130812035941137, epsilon = 1e-12);
    }
}
