#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratlearn::engine::{make_random_game, record_oblivious_trace, run_vs_adversary, Adversary};
use stratlearn::{LearnerParams, LossVector, MatrixGame, Strategy, Trace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_strategy(rng: &mut impl Rng, n: usize) -> Strategy {
    // Exponential spacings give the uniform distribution on the simplex.
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    Strategy::from_unnormalized(w).unwrap()
}

pub fn random_loss(rng: &mut impl Rng, n: usize) -> LossVector {
    LossVector::new((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

pub fn random_stream(rng: &mut impl Rng, n: usize, t: usize) -> Vec<LossVector> {
    (0..t).map(|_| random_loss(rng, n)).collect()
}

/// Loss streams of several shapes: i.i.d. noise, an oblivious MWU replay and
/// the losses a reactive MWU adversary produced against an FTRL probe.
pub fn streams(seed: u64, n: usize, t: usize) -> Vec<(String, Vec<LossVector>)> {
    let mut r = rng(seed);
    let game = make_random_game(n, n, seed).unwrap();
    let replay = record_oblivious_trace(&game, 0.5, t, None).unwrap();
    let oblivious = stratlearn::engine::run_vs_adversary(
        &game,
        LearnerParams::new(stratlearn::LearnerKind::Ftrl, 0.1),
        &Adversary::Replay(replay),
        t,
    )
    .unwrap()
    .loss_stream();
    let reactive = run_vs_adversary(
        &game,
        LearnerParams::new(stratlearn::LearnerKind::Ftrl, 0.1),
        &Adversary::NonObliviousMwu { eta: 1.0 / (t as f64).sqrt() },
        t,
    )
    .unwrap()
    .loss_stream();
    vec![
        ("iid".into(), random_stream(&mut r, n, t)),
        ("oblivious".into(), oblivious),
        ("reactive".into(), reactive),
    ]
}

/// Plays a learner against a fixed stream.
pub fn play(params: LearnerParams, stream: &[LossVector]) -> Trace {
    let mut l = stratlearn::LearnerState::new(params, stream[0].len()).unwrap();
    let mut trace = Trace::with_capacity(stream.len());
    for x in stream {
        trace.push(l.current().clone(), x.clone()).unwrap();
        l.observe(x).unwrap();
    }
    trace
}

pub fn pennies() -> MatrixGame {
    MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
}
