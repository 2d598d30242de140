use crate::engine::rng::SplitMix64;
use crate::error::{Error, Result};
use crate::game::{row_loss, MatrixGame};
use crate::learners::{LearnerKind, LearnerParams, LearnerState, Side};
use crate::strategy::{LossVector, Strategy};
use crate::trace::Trace;

/// `n x m` game with i.i.d. uniform `[0, 1)` entries drawn row by row.
pub fn make_random_game(n: usize, m: usize, seed: u64) -> Result<MatrixGame> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter { name: "n/m", reason: format!("need at least 2x2, got {n}x{m}") });
    }
    let mut rng = SplitMix64::new(seed);
    MatrixGame::new(n, m, (0..n * m).map(|_| rng.next_f64()).collect())
}

/// Records the column sequence of an MWU-vs-MWU run on a loss game.
///
/// A fixed MWU row player minimizes `f^T L y` with rate `fixed_eta` (the
/// adversary's own rate when `None`); the recorded column player runs MWU with
/// `adversary_eta` and maximizes it. Both start uniform and move
/// simultaneously. Replaying the sequence gives an oblivious adversary.
pub fn record_oblivious_trace(
    loss_game: &MatrixGame,
    adversary_eta: f64,
    horizon: usize,
    fixed_eta: Option<f64>,
) -> Result<Vec<Strategy>> {
    let lt = loss_game.transpose();
    let mut fixed = LearnerState::new(LearnerParams::new(LearnerKind::Mwu, fixed_eta.unwrap_or(adversary_eta)), loss_game.rows())?;
    let mut adversary = LearnerState::new(LearnerParams::new(LearnerKind::Mwu, adversary_eta), loss_game.cols())?;
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let f = fixed.current().clone();
        let y = adversary.current().clone();
        fixed.observe(&row_loss(loss_game, &y)?)?;
        adversary.amwu_step(&lt, &f, &f, Side::Max)?;
        out.push(y);
    }
    Ok(out)
}

/// Where the agent's opponent comes from in an adversarial run.
#[derive(Debug, Clone, PartialEq)]
pub enum Adversary {
    /// Column strategies fixed in advance, one per round.
    Replay(Vec<Strategy>),
    /// MWU column player maximizing the agent's loss, reacting to `f_1..f_{t-1}`.
    NonObliviousMwu { eta: f64 },
}

/// Plays the agent as the row player of the loss game `L` (entries in
/// `[0, 1]`) for `horizon` rounds. Round `t` scores `f_t` against
/// `x_t = L y_t`; then the agent observes `x_t` and a reactive adversary
/// observes `f_t`.
pub fn run_vs_adversary(
    loss_game: &MatrixGame,
    params: LearnerParams,
    adversary: &Adversary,
    horizon: usize,
) -> Result<Trace> {
    let mut agent = LearnerState::new(params, loss_game.rows())?;
    let mut trace = Trace::with_capacity(horizon);
    match adversary {
        Adversary::Replay(ys) => {
            if ys.len() < horizon {
                return Err(Error::ReplayTooShort { needed: horizon, available: ys.len() });
            }
            for y in &ys[..horizon] {
                let x = row_loss(loss_game, y)?;
                trace.push(agent.current().clone(), x.clone())?;
                agent.observe(&x)?;
            }
        }
        Adversary::NonObliviousMwu { eta } => {
            let lt = loss_game.transpose();
            let mut adv = LearnerState::new(LearnerParams::new(LearnerKind::Mwu, *eta), loss_game.cols())?;
            for _ in 0..horizon {
                let f = agent.current().clone();
                let x = row_loss(loss_game, adv.current())?;
                trace.push(f.clone(), x.clone())?;
                agent.observe(&x)?;
                adv.amwu_step(&lt, &f, &f, Side::Max)?;
            }
        }
    }
    Ok(trace)
}

/// Two-sided self-play on `f^T A y`: the row learner maximizes, the column
/// learner minimizes, both with the same parameters. `observe` is called
/// with `(t, f_t, y_t)` for `t = 1..=horizon` before the round's update.
///
/// In round one the "previous" opponent strategy is the current one.
pub fn self_play(
    game: &MatrixGame,
    params: LearnerParams,
    horizon: usize,
    start: Option<(Strategy, Strategy)>,
    mut observe: impl FnMut(usize, &Strategy, &Strategy) -> Result<()>,
) -> Result<()> {
    if !params.kind.is_multiplicative() {
        return Err(Error::InvalidParameter {
            name: "kind",
            reason: format!("self-play needs a multiplicative learner, got {}", params.kind),
        });
    }
    let (mut row, mut col) = match start {
        Some((f, y)) => (LearnerState::with_start(params, f)?, LearnerState::with_start(params, y)?),
        None => (LearnerState::new(params, game.rows())?, LearnerState::new(params, game.cols())?),
    };
    if row.dimension() != game.rows() || col.dimension() != game.cols() {
        return Err(Error::DimensionMismatch { expected: game.rows(), found: row.dimension() });
    }
    let linear = params.kind == LearnerKind::LinearAmwu;
    let mut f_prev = row.current().clone();
    let mut y_prev = col.current().clone();
    for t in 1..=horizon {
        let f = row.current().clone();
        let y = col.current().clone();
        observe(t, &f, &y)?;
        if linear {
            row.linear_amwu_step(game, &y, &y_prev, Side::Max)?;
            col.linear_amwu_step(game, &f, &f_prev, Side::Min)?;
        } else {
            row.amwu_step(game, &y, &y_prev, Side::Max)?;
            col.amwu_step(game, &f, &f_prev, Side::Min)?;
        }
        f_prev = f;
        y_prev = y;
    }
    Ok(())
}

/// Self-play with both sides recorded as traces. Each side's loss vector is
/// its payoff vector mapped affinely into `[0, 1]` (reversed for the
/// maximizer).
pub fn run_self_play(
    game: &MatrixGame,
    params: LearnerParams,
    horizon: usize,
    start: Option<(Strategy, Strategy)>,
) -> Result<(Trace, Trace)> {
    let (lo, hi) = game.entry_range();
    let width = hi - lo;
    let to_loss = |v: Vec<f64>, reverse: bool| {
        let mapped = v
            .into_iter()
            .map(|a| {
                if width <= 0.0 {
                    0.0
                } else if reverse {
                    ((hi - a) / width).clamp(0.0, 1.0)
                } else {
                    ((a - lo) / width).clamp(0.0, 1.0)
                }
            })
            .collect();
        LossVector::new(mapped)
    };
    let mut max_trace = Trace::with_capacity(horizon);
    let mut min_trace = Trace::with_capacity(horizon);
    self_play(game, params, horizon, start, |_, f, y| {
        max_trace.push(f.clone(), to_loss(game.row_payoffs(y)?, true)?)?;
        min_trace.push(y.clone(), to_loss(game.col_payoffs(f)?, false)?)?;
        Ok(())
    })?;
    Ok((max_trace, min_trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::dynamic_regret;

    fn pennies() -> MatrixGame {
        MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn random_games() {
        let a = make_random_game(20, 20, 7).unwrap();
        assert_eq!(a, make_random_game(20, 20, 7).unwrap());
        assert_ne!(a, make_random_game(20, 20, 8).unwrap());
        assert_eq!(a.entries().len(), 400);
        assert!(a.entries().iter().all(|v| (0.0..=1.0).contains(v)));
        let big = make_random_game(100, 100, 3).unwrap();
        let mean = big.entries().iter().sum::<f64>() / 1e4;
        assert!((0.49..=0.51).contains(&mean), "mean {mean}");
        assert!(make_random_game(1, 5, 0).is_err());
    }

    #[test]
    fn oblivious_recordings() {
        let zero = MatrixGame::new(3, 4, vec![0.0; 12]).unwrap();
        let ys = record_oblivious_trace(&zero, 0.5, 20, None).unwrap();
        assert!(ys.iter().all(|y| y == &Strategy::uniform(4)));

        let g = make_random_game(5, 5, 1).unwrap();
        assert_eq!(record_oblivious_trace(&g, 0.3, 50, None).unwrap(), record_oblivious_trace(&g, 0.3, 50, None).unwrap());

        let scaled = crate::game::LossScaling::for_game(&pennies()).apply(&pennies());
        let ys = record_oblivious_trace(&scaled, 0.5, 30, Some(0.1)).unwrap();
        assert!(ys.iter().all(|y| y == &Strategy::uniform(2)));
    }

    #[test]
    fn best_response_against_constant_adversary() {
        let g = make_random_game(6, 4, 11).unwrap();
        let y = Strategy::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let params = LearnerParams::new(LearnerKind::BestResponse, 1.0);
        let trace = run_vs_adversary(&g, params, &Adversary::Replay(vec![y; 50]), 50).unwrap();
        let dr = dynamic_regret(&trace);
        assert!(dr.iter().all(|&d| d == dr[0]));
    }

    #[test]
    fn adversarial_runs_are_deterministic() {
        let g = make_random_game(6, 6, 2).unwrap();
        let params = LearnerParams::new(LearnerKind::Ftrl, 0.1);
        let adv = Adversary::NonObliviousMwu { eta: 0.2 };
        assert_eq!(run_vs_adversary(&g, params, &adv, 100).unwrap(), run_vs_adversary(&g, params, &adv, 100).unwrap());
        let short = Adversary::Replay(vec![Strategy::uniform(6); 10]);
        assert_eq!(
            run_vs_adversary(&g, params, &short, 11).unwrap_err(),
            Error::ReplayTooShort { needed: 11, available: 10 }
        );
    }

    #[test]
    fn self_play_at_equilibrium_stays_put() {
        let u = Strategy::uniform(2);
        let params = LearnerParams::new(LearnerKind::Amwu, 0.1).with_alpha(10.0);
        let (f, y) = run_self_play(&pennies(), params, 100, None).unwrap();
        assert!(f.strategies().chain(y.strategies()).all(|s| s == &u));
        assert!(run_self_play(&pennies(), LearnerParams::new(LearnerKind::Ftrl, 0.1), 10, None).is_err());
    }

    #[test]
    fn mwu_self_play_spirals_out() {
        let start = Strategy::new(vec![0.6, 0.4]).unwrap();
        let params = LearnerParams::new(LearnerKind::Mwu, 0.01);
        let u = [0.5, 0.5];
        let mut dist = Vec::new();
        self_play(&pennies(), params, 10_000, Some((start.clone(), start)), |t, f, y| {
            if t == 10 || t == 10_000 {
                dist.push(crate::strategy::distance(f.as_slice(), &u, crate::strategy::Norm::L1)
                    + crate::strategy::distance(y.as_slice(), &u, crate::strategy::Norm::L1));
            }
            Ok(())
        })
        .unwrap();
        assert!(dist[1] > dist[0], "{dist:?}");
    }
}
