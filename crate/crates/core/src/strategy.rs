//! Probability vectors on the simplex, bounded loss vectors, and the handful of
//! vector primitives every learner and metric is built from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the simplex sum constraint.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Entries below this floor are lifted to it after multiplicative updates and
/// before taking logs.
pub const MASS_FLOOR: f64 = 1e-300;

/// Norm order for the `l_p` norms used in step bounds and strong convexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

impl Norm {
    /// The dual order `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Inf,
            Norm::L2 => Norm::L2,
            Norm::Inf => Norm::L1,
        }
    }
}

pub fn l_norm(v: &[f64], p: Norm) -> f64 {
    match p {
        Norm::L1 => v.iter().map(|x| x.abs()).sum(),
        Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Norm::Inf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

/// Norm of the difference `a - b`.
pub fn distance(a: &[f64], b: &[f64], p: Norm) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l_norm(&diff, p)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A mixed strategy: nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Strategy(Vec<f64>);

impl Strategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStrategy(format!(
                "entry {i} is {} (must be finite and nonnegative)",
                weights[i]
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidStrategy(format!("entries sum to {sum}")));
        }
        Ok(Strategy(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "strategy dimension must be positive");
        Strategy(vec![1.0 / n as f64; n])
    }

    /// The pure strategy putting all mass on `index`.
    pub fn pure(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Strategy(w)
    }

    /// Renormalizes nonnegative weights by their exact sum, then lifts entries
    /// below [`MASS_FLOOR`] to the floor.
    pub fn from_unnormalized(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NonFinite("unnormalized weights"));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidStrategy(format!("cannot normalize weights with sum {sum}")));
        }
        for w in weights.iter_mut() {
            *w = (*w / sum).max(MASS_FLOOR);
        }
        Ok(Strategy(weights))
    }

    /// Convex combination `lambda * a + (1 - lambda) * b`.
    pub fn mix(a: &Strategy, b: &Strategy, lambda: f64) -> Result<Self> {
        check_len(a.len(), b.len())?;
        let w = a
            .0
            .iter()
            .zip(&b.0)
            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
            .collect();
        Strategy::new(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Strategy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Strategy::new(v)
    }
}

impl From<Strategy> for Vec<f64> {
    fn from(s: Strategy) -> Vec<f64> {
        s.0
    }
}

impl AsRef<[f64]> for Strategy {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-action losses, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LossVector(Vec<f64>);

impl LossVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidLoss("empty loss vector".into()));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidLoss(format!("entry {i} is {} (must lie in [0, 1])", values[i])));
        }
        Ok(LossVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        LossVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<f64>> for LossVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        LossVector::new(v)
    }
}

impl From<LossVector> for Vec<f64> {
    fn from(x: LossVector) -> Vec<f64> {
        x.0
    }
}

impl AsRef<[f64]> for LossVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Expected loss `<a, x>` of playing `a` against the loss vector `x`.
pub fn inner(a: &Strategy, x: &LossVector) -> Result<f64> {
    check_len(a.len(), x.len())?;
    Ok(dot(a.as_slice(), x.as_slice()))
}

/// Relative entropy `sum_i p_i ln(p_i / q_i)`.
///
/// Terms with `p_i = 0` contribute nothing. A reference entry that is exactly
/// zero under positive `p_i` is an error; positive entries below
/// [`MASS_FLOOR`] are read as the floor.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p.len(), q.len())?;
    let mut acc = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::UndefinedDivergence { index: i });
        }
        acc += pi * (pi.max(MASS_FLOOR).ln() - qi.max(MASS_FLOOR).ln());
    }
    // Rounding can leave a tiny negative residue when p == q.
    Ok(acc.max(0.0))
}
