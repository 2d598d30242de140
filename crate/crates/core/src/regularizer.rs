//! Strongly convex regularizers over the simplex and the argmin / proximal
//! steps that FTRL-style and mirror-descent learners are built on.
//!
//! Both regularizers are shifted so that their minimum over the simplex is
//! exactly zero. Shifts never move an argmin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{kl_divergence, Norm, Strategy, MASS_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `R(f) = sum_i f_i ln f_i + ln n`; 1-strongly convex w.r.t. `l_1`.
    #[default]
    Entropy,
    /// `R(f) = |f|_2^2 / 2 - 1 / (2n)`; 1-strongly convex w.r.t. `l_2`.
    SquaredL2,
}

impl Regularizer {
    /// Strong convexity modulus.
    pub fn beta(self) -> f64 {
        1.0
    }

    pub fn primal_norm(self) -> Norm {
        match self {
            Regularizer::Entropy => Norm::L1,
            Regularizer::SquaredL2 => Norm::L2,
        }
    }

    pub fn dual_norm(self) -> Norm {
        self.primal_norm().dual()
    }

    pub fn value(self, f: &[f64]) -> f64 {
        let n = f.len() as f64;
        match self {
            Regularizer::Entropy => {
                f.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>() + n.ln()
            }
            Regularizer::SquaredL2 => 0.5 * f.iter().map(|p| p * p).sum::<f64>() - 0.5 / n,
        }
    }

    /// `max R - min R` over the n-simplex; attained at a vertex.
    pub fn range(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Regularizer::Entropy => n.ln(),
            Regularizer::SquaredL2 => 0.5 - 0.5 / n,
        }
    }

    /// `argmin_f <f, cumulative> + R(f) / eta` over the simplex.
    pub fn argmin(self, cumulative: &[f64], eta: f64) -> Result<Strategy> {
        check_eta(eta)?;
        if cumulative.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("cumulative loss"));
        }
        let scores: Vec<f64> = cumulative.iter().map(|c| -eta * c).collect();
        match self {
            Regularizer::Entropy => softmax(&scores),
            Regularizer::SquaredL2 => project_to_simplex(&scores),
        }
    }

    /// Bregman divergence `D_R(a, b)`.
    pub fn bregman(self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            Regularizer::Entropy => kl_divergence(a, b),
            Regularizer::SquaredL2 => {
                crate::strategy::check_len(a.len(), b.len())?;
                Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            }
        }
    }

    /// `argmin_g eta <g, grad> + D_R(g, prior)` over the simplex.
    pub fn prox(self, prior: &Strategy, grad: &[f64], eta: f64) -> Result<Strategy> {
        check_eta(eta)?;
        crate::strategy::check_len(prior.len(), grad.len())?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        match self {
            Regularizer::Entropy => {
                // Work in log space so that tiny prior masses survive large steps.
                let scores: Vec<f64> = prior
                    .as_slice()
                    .iter()
                    .zip(grad)
                    .map(|(p, g)| p.max(MASS_FLOOR).ln() - eta * g)
                    .collect();
                softmax(&scores)
            }
            Regularizer::SquaredL2 => {
                let v: Vec<f64> = prior.as_slice().iter().zip(grad).map(|(p, g)| p - eta * g).collect();
                project_to_simplex(&v)
            }
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter { name: "eta", reason: format!("must be positive and finite, got {eta}") });
    }
    Ok(())
}

/// `softmax(scores)` with max-subtraction.
pub fn softmax(scores: &[f64]) -> Result<Strategy> {
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("softmax scores"));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Strategy::from_unnormalized(scores.iter().map(|s| (s - max).exp()).collect())
}

/// Euclidean projection onto the probability simplex by sort-and-threshold.
///
/// Coordinates are ranked by value with ties kept in index order.
pub fn project_to_simplex(v: &[f64]) -> Result<Strategy> {
    if v.is_empty() {
        return Err(Error::InvalidStrategy("cannot project an empty vector".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input"));
    }
    let theta = simplex_threshold(v);
    let w: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // The clipped vector sums to one up to rounding; renormalize exactly.
    let sum: f64 = w.iter().sum();
    Strategy::new(w.into_iter().map(|x| x / sum).collect())
}

/// The threshold `theta` with `sum_i max(v_i - theta, 0) = 1`.
pub fn simplex_threshold(v: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (k, &i) in order.iter().enumerate() {
        prefix += v[i];
        let candidate = (prefix - 1.0) / (k + 1) as f64;
        if v[i] - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}
