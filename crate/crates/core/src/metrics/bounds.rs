//! Right-hand minus left-hand sides of the regret and stability inequalities
//! the learners satisfy. A nonnegative slack means the inequality holds.

use crate::regularizer::Regularizer;
use crate::strategy::{distance, dot, LossVector, Norm, Strategy};
use crate::trace::Trace;

/// Per-round step of an FTRL-type learner: `2 eta n / beta`.
pub fn ftrl_step_bound(eta: f64, n: usize, beta: f64) -> f64 {
    2.0 * eta * n as f64 / beta
}

/// Per-round step of the mirror-descent iterate: `eta n / beta`.
pub fn omd_step_bound(eta: f64, n: usize, beta: f64) -> f64 {
    eta * n as f64 / beta
}

/// `sum_t |x_t - x_{t-1}|^2` with `x_0 = 0`.
pub fn squared_variation(stream: &[LossVector], norm: Norm) -> f64 {
    let mut prev: Option<&LossVector> = None;
    let mut acc = 0.0;
    for x in stream {
        let d = match prev {
            Some(p) => distance(x.as_slice(), p.as_slice(), norm),
            None => distance(x.as_slice(), &vec![0.0; x.len()], norm),
        };
        acc += d * d;
        prev = Some(x);
    }
    acc
}

fn column_sums(stream: &[LossVector]) -> Vec<f64> {
    let mut sums = vec![0.0; stream.first().map_or(0, LossVector::len)];
    for x in stream {
        for (c, v) in sums.iter_mut().zip(x.as_slice()) {
            *c += v;
        }
    }
    sums
}

/// Total loss of a strategy sequence against a stream.
pub fn sequence_loss(strategies: &[Strategy], stream: &[LossVector]) -> f64 {
    strategies.iter().zip(stream).map(|(g, x)| dot(g.as_slice(), x.as_slice())).sum()
}

/// Best pure strategy in hindsight.
pub fn best_fixed(stream: &[LossVector]) -> Strategy {
    let sums = column_sums(stream);
    let (best, _) = sums
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    Strategy::pure(sums.len(), best)
}

/// `<f', sum x> + R(f') / eta - sum <g_t, x_t>` for the forward comparators `g`.
pub fn forward_comparator_slack(
    stream: &[LossVector],
    comparators: &[Strategy],
    reg: Regularizer,
    eta: f64,
    f_prime: &Strategy,
) -> f64 {
    let sums = column_sums(stream);
    dot(f_prime.as_slice(), &sums) + reg.value(f_prime.as_slice()) / eta - sequence_loss(comparators, stream)
}

/// Accurate-FTRL inequality against the best fixed strategy:
///
/// `sum <f_t,x_t> - <f',sum x>/alpha - (alpha-1)/alpha sum <g_t,x_t>
///   <= R(f')/(eta alpha) + (eta alpha/beta) sum |x_t - x_{t-1}|_q^2`.
///
/// Meaningful for `alpha >= 1`.
pub fn aftrl_regret_slack(trace: &Trace, comparators: &[Strategy], reg: Regularizer, eta: f64, alpha: f64) -> f64 {
    let stream = trace.loss_stream();
    let f_prime = best_fixed(&stream);
    let lhs = trace.total_loss() - dot(f_prime.as_slice(), &column_sums(&stream)) / alpha
        - (alpha - 1.0) / alpha * sequence_loss(comparators, &stream);
    let rhs = reg.value(f_prime.as_slice()) / (eta * alpha)
        + eta * alpha / reg.beta() * squared_variation(&stream, reg.dual_norm());
    rhs - lhs
}

/// Accurate-mirror-descent inequality with the mirror iterates `g_{t+1}`
/// (the iterate produced after observing `x_t`):
///
/// `sum <f_t,x_t> - <f',sum x>/alpha - (alpha-1)/alpha sum <g_{t+1},x_t>
///   <= (eta alpha/(2 beta)) sum |x_t - x_{t-1}|_q^2 + (max R - min R)/(eta alpha)`.
pub fn amd_regret_slack(trace: &Trace, next_mirror: &[Strategy], reg: Regularizer, eta: f64, alpha: f64) -> f64 {
    let stream = trace.loss_stream();
    let f_prime = best_fixed(&stream);
    let n = f_prime.len();
    let lhs = trace.total_loss() - dot(f_prime.as_slice(), &column_sums(&stream)) / alpha
        - (alpha - 1.0) / alpha * sequence_loss(next_mirror, &stream);
    let rhs = eta * alpha / (2.0 * reg.beta()) * squared_variation(&stream, reg.dual_norm()) + reg.range(n) / (eta * alpha);
    rhs - lhs
}

/// Prod-BR against its internal FTRL iterates: `sum <f_t,x_t> + 2 sqrt(T ln T) - sum <g_t,x_t>`.
pub fn prod_vs_ftrl_slack(played_loss: f64, ftrl_loss: f64, horizon: usize) -> f64 {
    let t = horizon as f64;
    ftrl_loss + 2.0 * (t * t.ln()).sqrt() - played_loss
}

/// Prod-BR against its best responses: `sum <BR_t,x_t> + 2 ln 2 - sum <g_t,x_t>`.
pub fn prod_vs_br_slack(played_loss: f64, br_loss: f64) -> f64 {
    br_loss + 2.0 * std::f64::consts::LN_2 - played_loss
}

/// Doubling-trick guarantee `8 sqrt(sum |dx|_q^2) sqrt(alpha R_max / beta)` minus
/// the external regret of the run.
pub fn doubling_regret_slack(trace: &Trace, reg: Regularizer, alpha: f64) -> f64 {
    let stream = trace.loss_stream();
    let n = stream.first().map_or(1, LossVector::len);
    let regret = crate::metrics::external_regret(trace).last().copied().unwrap_or(0.0);
    let bound = 8.0 * squared_variation(&stream, reg.dual_norm()).sqrt() * (alpha * reg.range(n) / reg.beta()).sqrt();
    bound - regret
}

/// `FR_T - (R_T - R_max / eta)`; forward regret never falls further below
/// external regret than the regularizer range allows.
pub fn forward_vs_external_slack(forward: f64, external: f64, reg: Regularizer, n: usize, eta: f64) -> f64 {
    forward - (external - reg.range(n) / eta)
}
