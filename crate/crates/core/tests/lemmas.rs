//! The learners' stability and regret inequalities, asserted on every run.

mod common;

use common::{play, random_strategy, rng, streams};
use stratlearn::learners::{LearnerKind, LearnerParams, LearnerState};
use stratlearn::metrics::{self, bounds};
use stratlearn::{LossVector, Norm, Regularizer, Strategy, Trace};

const T: usize = 1000;
const N: usize = 6;
const REGS: [Regularizer; 2] = [Regularizer::Entropy, Regularizer::SquaredL2];

#[test]
fn ftrl_steps_are_bounded() {
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for eta in [0.01, 0.1, 1.0] {
                    let trace = play(LearnerParams::new(LearnerKind::Ftrl, eta).with_regularizer(reg), &stream);
                    let bound = bounds::ftrl_step_bound(eta, N, reg.beta());
                    for (t, d) in metrics::step_distances(&trace, reg.primal_norm()).iter().enumerate() {
                        assert!(*d <= bound, "{name} {reg:?} eta {eta} round {t}: {d} > {bound}");
                    }
                }
            }
        }
    }
}

#[test]
fn mirror_iterate_steps_are_bounded() {
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for (eta, alpha) in [(0.01, 1.0), (0.1, 5.0), (0.5, 0.0)] {
                    let params = LearnerParams::new(LearnerKind::Amd, eta).with_alpha(alpha).with_regularizer(reg);
                    let mut l = LearnerState::new(params, N).unwrap();
                    let bound = bounds::omd_step_bound(eta, N, reg.beta());
                    for x in &stream {
                        let before = l.secondary().clone();
                        l.observe(x).unwrap();
                        let d = stratlearn::strategy::distance(
                            l.secondary().as_slice(),
                            before.as_slice(),
                            reg.primal_norm(),
                        );
                        assert!(d <= bound, "{name} {reg:?}: {d} > {bound}");
                    }
                }
            }
        }
    }
}

#[test]
fn forward_comparators_beat_every_fixed_strategy() {
    let mut r = rng(99);
    for seed in 0..2 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for eta in [0.05, 0.5] {
                    let g = metrics::forward_comparators(&stream, reg, eta).unwrap();
                    let mut candidates: Vec<Strategy> = (0..1000).map(|_| random_strategy(&mut r, N)).collect();
                    candidates.extend((0..N).map(|i| Strategy::pure(N, i)));
                    for f in &candidates {
                        let slack = bounds::forward_comparator_slack(&stream, &g, reg, eta, f);
                        assert!(slack >= -1e-9, "{name} {reg:?} eta {eta}: slack {slack}");
                    }
                }
            }
        }
    }
}

#[test]
fn accurate_ftrl_regret_inequality() {
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for eta in [0.01, 0.1, 0.5] {
                    for alpha in [1.0, 2.0, 10.0, 100.0] {
                        let params = LearnerParams::new(LearnerKind::Aftrl, eta).with_alpha(alpha).with_regularizer(reg);
                        let trace = play(params, &stream);
                        let g = metrics::forward_comparators(&stream, reg, eta).unwrap();
                        let slack = bounds::aftrl_regret_slack(&trace, &g, reg, eta, alpha);
                        assert!(slack >= -1e-9, "{name} {reg:?} eta {eta} alpha {alpha}: slack {slack}");
                    }
                }
            }
        }
    }
}

#[test]
fn accurate_mirror_descent_regret_inequality() {
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for eta in [0.01, 0.1, 0.5] {
                    for alpha in [1.0, 2.0, 10.0, 100.0] {
                        let params = LearnerParams::new(LearnerKind::Amd, eta).with_alpha(alpha).with_regularizer(reg);
                        let mut l = LearnerState::new(params, N).unwrap();
                        let mut trace = Trace::new();
                        let mut next_mirror = Vec::new();
                        for x in &stream {
                            trace.push(l.current().clone(), x.clone()).unwrap();
                            l.observe(x).unwrap();
                            next_mirror.push(l.secondary().clone());
                        }
                        let slack = bounds::amd_regret_slack(&trace, &next_mirror, reg, eta, alpha);
                        assert!(slack >= -1e-9, "{name} {reg:?} eta {eta} alpha {alpha}: slack {slack}");
                    }
                }
            }
        }
    }
}

fn prod_run(stream: &[LossVector]) -> (f64, f64, f64) {
    let params = LearnerParams::new(LearnerKind::ProdBr, 1.0).with_horizon(stream.len());
    let mut l = LearnerState::new(params, stream[0].len()).unwrap();
    let (mut played, mut ftrl, mut br) = (0.0, 0.0, 0.0);
    for x in stream {
        let p = l.prod_state().unwrap();
        played += stratlearn::inner(l.current(), x).unwrap();
        ftrl += stratlearn::inner(&p.ftrl_iterate, x).unwrap();
        br += stratlearn::inner(&p.best_response, x).unwrap();
        l.observe(x).unwrap();
        assert!(l.prod_state().unwrap().weight_r > 0.0);
    }
    (played, ftrl, br)
}

#[test]
fn prod_br_stays_close_to_both_components() {
    for seed in 0..5 {
        for (name, stream) in streams(seed, N, T) {
            let (played, ftrl, br) = prod_run(&stream);
            let a = bounds::prod_vs_ftrl_slack(played, ftrl, T);
            let b = bounds::prod_vs_br_slack(played, br);
            assert!(a >= 0.0 && b >= 0.0, "{name}: {a} {b}");
        }
    }
}

#[test]
fn doubling_trick_regret_bound() {
    let mut restarted_runs = 0;
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for (eta0, alpha) in [(1.0, 1.0), (0.5, 10.0), (2.0, 2.0)] {
                    let params =
                        LearnerParams::new(LearnerKind::DoublingAftrl, eta0).with_alpha(alpha).with_regularizer(reg);
                    let mut l = LearnerState::new(params, N).unwrap();
                    let mut trace = Trace::new();
                    for x in &stream {
                        trace.push(l.current().clone(), x.clone()).unwrap();
                        l.observe(x).unwrap();
                    }
                    if l.doubling_state().unwrap().restarts.is_empty() {
                        continue;
                    }
                    restarted_runs += 1;
                    let slack = bounds::doubling_regret_slack(&trace, reg, alpha);
                    assert!(slack >= 0.0, "{name} {reg:?} eta0 {eta0} alpha {alpha}: slack {slack}");
                }
            }
        }
    }
    assert!(restarted_runs > 10, "only {restarted_runs} runs restarted");
}

#[test]
fn forward_regret_is_not_far_below_external_regret() {
    for seed in 0..3 {
        for (name, stream) in streams(seed, N, T) {
            for reg in REGS {
                for eta in [0.01, 0.1, 1.0] {
                    for kind in [LearnerKind::Mwu, LearnerKind::Ftrl, LearnerKind::Aftrl] {
                        let mut params = LearnerParams::new(kind, eta).with_regularizer(reg);
                        if kind == LearnerKind::Aftrl {
                            params = params.with_alpha(50.0);
                        }
                        if kind == LearnerKind::Mwu && reg != Regularizer::Entropy {
                            continue;
                        }
                        let trace = play(params, &stream);
                        let fr = metrics::forward_regret(&trace, reg, eta).unwrap();
                        let er = metrics::external_regret(&trace);
                        for (f, e) in fr.iter().zip(&er) {
                            let slack = bounds::forward_vs_external_slack(*f, *e, reg, N, eta);
                            assert!(slack >= -1e-9, "{name} {kind} {reg:?} eta {eta}: {slack}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn mwu_classical_regret_rate() {
    for seed in 0..5 {
        for (name, stream) in streams(seed, N, T) {
            let eta = ((N as f64).ln() / T as f64).sqrt();
            let trace = play(LearnerParams::new(LearnerKind::Mwu, eta), &stream);
            let r = *metrics::external_regret(&trace).last().unwrap();
            assert!(r / T as f64 <= 2.0 * eta, "{name}: {}", r / T as f64);
        }
    }
}

#[test]
fn mwu_step_within_ftrl_bound_at_horizon_rate() {
    let stream = streams(4, N, T).remove(0).1;
    let eta = 1.0 / (T as f64).sqrt();
    let trace = play(LearnerParams::new(LearnerKind::Mwu, eta), &stream);
    let max = metrics::step_distances(&trace, Norm::L1).into_iter().fold(0.0, f64::max);
    assert!(max <= bounds::ftrl_step_bound(eta, N, 1.0));
}
