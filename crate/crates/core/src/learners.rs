//! Online learners behind one step interface: observe the last loss vector,
//! emit the next strategy.
//!
//! The exploiting rate `alpha` weights the most recent loss as a prediction of
//! the next one. `alpha = 0` gives the classical learner, `alpha = 1` its
//! optimistic variant. Before any observation every learner plays the
//! minimizer of its regularizer (the uniform strategy), and wherever a
//! "previous loss" is needed in round one the zero vector stands in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::MatrixGame;
use crate::regularizer::Regularizer;
use crate::strategy::{check_len, distance, dot, LossVector, Strategy};

/// Two payoffs closer than this are treated as tied by best response.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "FTRL")]
    Ftrl,
    #[serde(rename = "AFTRL")]
    Aftrl,
    #[serde(rename = "OFTRL")]
    Oftrl,
    #[serde(rename = "AMD")]
    Amd,
    #[serde(rename = "MWU")]
    Mwu,
    #[serde(rename = "OMWU")]
    Omwu,
    #[serde(rename = "AMWU")]
    Amwu,
    #[serde(rename = "LinearAMWU")]
    LinearAmwu,
    #[serde(rename = "BestResponse")]
    BestResponse,
    #[serde(rename = "ProdBR")]
    ProdBr,
    #[serde(rename = "DoublingAFTRL")]
    DoublingAftrl,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 11] = [
        LearnerKind::Ftrl,
        LearnerKind::Aftrl,
        LearnerKind::Oftrl,
        LearnerKind::Amd,
        LearnerKind::Mwu,
        LearnerKind::Omwu,
        LearnerKind::Amwu,
        LearnerKind::LinearAmwu,
        LearnerKind::BestResponse,
        LearnerKind::ProdBr,
        LearnerKind::DoublingAftrl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::Ftrl => "FTRL",
            LearnerKind::Aftrl => "AFTRL",
            LearnerKind::Oftrl => "OFTRL",
            LearnerKind::Amd => "AMD",
            LearnerKind::Mwu => "MWU",
            LearnerKind::Omwu => "OMWU",
            LearnerKind::Amwu => "AMWU",
            LearnerKind::LinearAmwu => "LinearAMWU",
            LearnerKind::BestResponse => "BestResponse",
            LearnerKind::ProdBr => "ProdBR",
            LearnerKind::DoublingAftrl => "DoublingAFTRL",
        }
    }

    /// The exploiting rate a kind is defined with, if it is not free.
    pub fn fixed_alpha(self) -> Option<f64> {
        match self {
            LearnerKind::Ftrl | LearnerKind::Mwu => Some(0.0),
            LearnerKind::Oftrl | LearnerKind::Omwu => Some(1.0),
            LearnerKind::BestResponse | LearnerKind::ProdBr => Some(0.0),
            _ => None,
        }
    }

    /// Whether the kind takes a learning rate from the caller.
    pub fn uses_eta(self) -> bool {
        !matches!(self, LearnerKind::BestResponse | LearnerKind::ProdBr)
    }

    /// Kinds that update by multiplying weights; these are the only kinds that
    /// can play both sides of a matrix game directly.
    pub fn is_multiplicative(self) -> bool {
        matches!(self, LearnerKind::Mwu | LearnerKind::Omwu | LearnerKind::Amwu | LearnerKind::LinearAmwu)
    }
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of `f^T A y` a multiplicative learner plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Row player, maximizes.
    Max,
    /// Column player, minimizes.
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    pub kind: LearnerKind,
    pub eta: f64,
    pub alpha: f64,
    pub regularizer: Regularizer,
    /// Needed by kinds whose parameters depend on the horizon.
    pub horizon: Option<usize>,
}

impl LearnerParams {
    /// Parameters with the kind's own exploiting rate (zero for free kinds)
    /// and the entropy regularizer.
    pub fn new(kind: LearnerKind, eta: f64) -> Self {
        LearnerParams {
            kind,
            eta,
            alpha: kind.fixed_alpha().unwrap_or(0.0),
            regularizer: Regularizer::Entropy,
            horizon: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_regularizer(mut self, regularizer: Regularizer) -> Self {
        self.regularizer = regularizer;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_eta() && (!(self.eta > 0.0) || !self.eta.is_finite()) {
            return Err(Error::InvalidParameter { name: "eta", reason: format!("must be positive, got {}", self.eta) });
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be nonnegative, got {}", self.alpha),
            });
        }
        if let Some(fixed) = self.kind.fixed_alpha() {
            if self.alpha != fixed && self.kind.uses_eta() {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    reason: format!("{} is defined with alpha = {fixed}, got {}", self.kind, self.alpha),
                });
            }
        }
        if self.kind.is_multiplicative() && self.regularizer != Regularizer::Entropy {
            return Err(Error::InvalidParameter {
                name: "regularizer",
                reason: format!("{} is an entropic learner", self.kind),
            });
        }
        if self.kind == LearnerKind::ProdBr {
            match self.horizon {
                None => return Err(Error::MissingHorizon("ProdBR")),
                Some(t) if t < 2 => {
                    return Err(Error::InvalidParameter { name: "horizon", reason: "ProdBR needs T >= 2".into() })
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Prod-BR bookkeeping: the internal FTRL iterate and best response that were
/// mixed into the strategy currently being played.
#[derive(Debug, Clone, PartialEq)]
pub struct ProdState {
    pub ftrl_eta: f64,
    pub eta1: f64,
    pub weight_r: f64,
    pub weight_br: f64,
    pub ftrl_iterate: Strategy,
    pub best_response: Strategy,
}

impl ProdState {
    /// `ftrl_eta = n / sqrt(2T)`, `eta1 = sqrt(ln T / T) / 2`, `w_R = eta1`,
    /// `w_BR = 1 - eta1`.
    pub fn for_horizon(n: usize, horizon: usize) -> Self {
        let t = horizon as f64;
        let eta1 = 0.5 * (t.ln() / t).sqrt();
        ProdState {
            ftrl_eta: n as f64 / (2.0 * t).sqrt(),
            eta1,
            weight_r: eta1,
            weight_br: 1.0 - eta1,
            ftrl_iterate: Strategy::uniform(n),
            best_response: Strategy::uniform(n),
        }
    }
}

/// `w (1 + eta1 * gap)` where `gap = <BR - f, x>`.
pub fn prod_weight_update(weight: f64, eta1: f64, gap: f64) -> f64 {
    weight * (1.0 + eta1 * gap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingState {
    pub eta0: f64,
    pub phase: u32,
    /// Round (1-based) at which the current phase began.
    pub phase_start: usize,
    /// `sum |x_t - x_{t-1}|_q^2` over the current phase.
    pub accumulator: f64,
    /// Rounds after whose observation a restart fired.
    pub restarts: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LearnerState {
    params: LearnerParams,
    n: usize,
    eta: f64,
    cumulative_loss: Vec<f64>,
    prev_loss: Vec<f64>,
    current: Strategy,
    secondary: Strategy,
    prod: Option<ProdState>,
    doubling: Option<DoublingState>,
    rounds: usize,
}

impl LearnerState {
    pub fn new(params: LearnerParams, n: usize) -> Result<Self> {
        params.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter { name: "n", reason: "need at least one action".into() });
        }
        let uniform = Strategy::uniform(n);
        let prod = (params.kind == LearnerKind::ProdBr)
            .then(|| ProdState::for_horizon(n, params.horizon.expect("validated")));
        let doubling = (params.kind == LearnerKind::DoublingAftrl).then(|| DoublingState {
            eta0: params.eta,
            phase: 0,
            phase_start: 1,
            accumulator: 0.0,
            restarts: Vec::new(),
        });
        let eta = prod.as_ref().map_or(params.eta, |p| p.ftrl_eta);
        Ok(LearnerState {
            params,
            n,
            eta,
            cumulative_loss: vec![0.0; n],
            prev_loss: vec![0.0; n],
            current: uniform.clone(),
            secondary: uniform,
            prod,
            doubling,
            rounds: 0,
        })
    }

    /// Starts a multiplicative learner from an arbitrary interior strategy.
    pub fn with_start(params: LearnerParams, start: Strategy) -> Result<Self> {
        let mut s = LearnerState::new(params, start.len())?;
        s.current = start.clone();
        s.secondary = start;
        Ok(s)
    }

    pub fn params(&self) -> &LearnerParams {
        &self.params
    }

    pub fn kind(&self) -> LearnerKind {
        self.params.kind
    }

    /// Learning rate in force right now (phase rate for the doubling trick,
    /// the internal FTRL rate for Prod-BR).
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn regularizer(&self) -> Regularizer {
        self.params.regularizer
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Strategy to be played in the coming round.
    pub fn current(&self) -> &Strategy {
        &self.current
    }

    /// AMD's mirror-descent iterate `g_t`; equals `current` for other kinds.
    pub fn secondary(&self) -> &Strategy {
        &self.secondary
    }

    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative_loss
    }

    pub fn prev_loss(&self) -> &[f64] {
        &self.prev_loss
    }

    pub fn prod_state(&self) -> Option<&ProdState> {
        self.prod.as_ref()
    }

    pub fn doubling_state(&self) -> Option<&DoublingState> {
        self.doubling.as_ref()
    }

    pub fn rounds_observed(&self) -> usize {
        self.rounds
    }

    /// Feeds the loss vector of the round just played and returns the
    /// strategy for the next round.
    pub fn observe(&mut self, observed: &LossVector) -> Result<Strategy> {
        match self.params.kind {
            LearnerKind::Ftrl | LearnerKind::Aftrl | LearnerKind::Oftrl => self.aftrl_step(observed),
            LearnerKind::Amd => self.amd_step(observed),
            LearnerKind::Mwu | LearnerKind::Omwu | LearnerKind::Amwu | LearnerKind::LinearAmwu => {
                self.multiplicative_loss_step(observed)
            }
            LearnerKind::BestResponse => {
                check_len(self.n, observed.len())?;
                self.record(observed);
                let next = best_response(observed);
                Ok(self.set_current(next))
            }
            LearnerKind::ProdBr => self.prodbr_step(observed),
            LearnerKind::DoublingAftrl => self.doubling_aftrl_step(observed),
        }
    }

    fn expect_kind(&self, allowed: &[LearnerKind], op: &'static str) -> Result<()> {
        if !allowed.contains(&self.params.kind) {
            return Err(Error::InvalidParameter {
                name: "kind",
                reason: format!("{op} is not defined for {}", self.params.kind),
            });
        }
        Ok(())
    }

    fn record(&mut self, observed: &LossVector) {
        for (c, x) in self.cumulative_loss.iter_mut().zip(observed.as_slice()) {
            *c += x;
        }
        self.prev_loss.copy_from_slice(observed.as_slice());
        self.rounds += 1;
    }

    fn set_current(&mut self, next: Strategy) -> Strategy {
        debug_assert!(Strategy::new(next.as_slice().to_vec()).is_ok(), "learner produced an invalid strategy");
        self.current = next.clone();
        if self.params.kind != LearnerKind::Amd {
            self.secondary = next.clone();
        }
        next
    }

    /// `f_{t+1} = argmin <f, sum_{s<=t} x_s + alpha x_t> + R(f) / eta`.
    pub fn aftrl_step(&mut self, observed: &LossVector) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::Ftrl, LearnerKind::Aftrl, LearnerKind::Oftrl], "aftrl_step")?;
        check_len(self.n, observed.len())?;
        self.record(observed);
        let next = self.leader(self.eta)?;
        Ok(self.set_current(next))
    }

    fn leader(&self, eta: f64) -> Result<Strategy> {
        let alpha = self.params.alpha;
        let target: Vec<f64> = if alpha == 0.0 {
            self.cumulative_loss.clone()
        } else {
            self.cumulative_loss.iter().zip(&self.prev_loss).map(|(c, x)| c + alpha * x).collect()
        };
        self.params.regularizer.argmin(&target, eta)
    }

    /// Mirror step `g <- prox(g, x_t)` followed by the prediction step
    /// `f <- prox(g, alpha x_t)`.
    pub fn amd_step(&mut self, observed: &LossVector) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::Amd], "amd_step")?;
        check_len(self.n, observed.len())?;
        self.record(observed);
        let reg = self.params.regularizer;
        let g = reg.prox(&self.secondary, observed.as_slice(), self.eta)?;
        let f = if self.params.alpha == 0.0 {
            g.clone()
        } else {
            let predicted: Vec<f64> = observed.as_slice().iter().map(|x| self.params.alpha * x).collect();
            reg.prox(&g, &predicted, self.eta)?
        };
        self.secondary = g;
        Ok(self.set_current(f))
    }

    fn multiplicative_loss_step(&mut self, observed: &LossVector) -> Result<Strategy> {
        check_len(self.n, observed.len())?;
        let exponent = self.exponent(observed.as_slice(), &self.prev_loss, -1.0);
        let next = self.apply_exponent(&exponent)?;
        self.record(observed);
        Ok(self.set_current(next))
    }

    /// One self-play update against the opponent's current and previous
    /// strategies.
    ///
    /// Max side: `f_i <- f_i exp(eta((alpha+1)(A y_t)_i - alpha (A y_{t-1})_i))`.
    /// Min side: the same with `A^T f` and a negated exponent.
    pub fn amwu_step(
        &mut self,
        game: &MatrixGame,
        opp_now: &Strategy,
        opp_prev: &Strategy,
        side: Side,
    ) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::Mwu, LearnerKind::Omwu, LearnerKind::Amwu], "amwu_step")?;
        self.game_step(game, opp_now, opp_prev, side)
    }

    /// Linearized update `f_i <- f_i (1 + exponent_i)`; fails if any
    /// multiplier is not positive.
    pub fn linear_amwu_step(
        &mut self,
        game: &MatrixGame,
        opp_now: &Strategy,
        opp_prev: &Strategy,
        side: Side,
    ) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::LinearAmwu], "linear_amwu_step")?;
        self.game_step(game, opp_now, opp_prev, side)
    }

    fn game_step(&mut self, game: &MatrixGame, opp_now: &Strategy, opp_prev: &Strategy, side: Side) -> Result<Strategy> {
        let (now, prev, sign) = match side {
            Side::Max => {
                check_len(game.rows(), self.n)?;
                (game.row_payoffs(opp_now)?, game.row_payoffs(opp_prev)?, 1.0)
            }
            Side::Min => {
                check_len(game.cols(), self.n)?;
                (game.col_payoffs(opp_now)?, game.col_payoffs(opp_prev)?, -1.0)
            }
        };
        let exponent = self.exponent(&now, &prev, sign);
        let next = self.apply_exponent(&exponent)?;
        self.rounds += 1;
        Ok(self.set_current(next))
    }

    fn exponent(&self, now: &[f64], prev: &[f64], sign: f64) -> Vec<f64> {
        let eta = self.eta;
        let alpha = self.params.alpha;
        match self.params.kind {
            LearnerKind::Mwu => now.iter().map(|a| sign * eta * a).collect(),
            LearnerKind::Omwu => now.iter().zip(prev).map(|(a, b)| sign * eta * (2.0 * a - b)).collect(),
            _ => now.iter().zip(prev).map(|(a, b)| sign * eta * ((alpha + 1.0) * a - alpha * b)).collect(),
        }
    }

    fn apply_exponent(&self, exponent: &[f64]) -> Result<Strategy> {
        if exponent.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("update exponent"));
        }
        let f = self.current.as_slice();
        if self.params.kind == LearnerKind::LinearAmwu {
            let mut w = Vec::with_capacity(f.len());
            for (i, (p, e)) in f.iter().zip(exponent).enumerate() {
                let multiplier = 1.0 + e;
                if multiplier <= 0.0 {
                    return Err(Error::NonPositiveMultiplier { index: i, value: multiplier });
                }
                w.push(p * multiplier);
            }
            return Strategy::from_unnormalized(w);
        }
        let max = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Strategy::from_unnormalized(f.iter().zip(exponent).map(|(p, e)| p * (e - max).exp()).collect())
    }

    /// Mixes the internal FTRL iterate with a best response to the last loss,
    /// after reweighting by how the previous pair fared on that loss.
    pub fn prodbr_step(&mut self, observed: &LossVector) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::ProdBr], "prodbr_step")?;
        check_len(self.n, observed.len())?;
        self.record(observed);
        let reg = self.params.regularizer;
        let prod = self.prod.as_mut().ok_or(Error::MissingHorizon("ProdBR"))?;
        let x = observed.as_slice();
        let gap = dot(prod.best_response.as_slice(), x) - dot(prod.ftrl_iterate.as_slice(), x);
        prod.weight_r = prod_weight_update(prod.weight_r, prod.eta1, gap);
        prod.ftrl_iterate = reg.argmin(&self.cumulative_loss, prod.ftrl_eta)?;
        prod.best_response = best_response(observed);
        let lambda = prod.weight_r / (prod.weight_r + prod.weight_br);
        let next = Strategy::mix(&prod.ftrl_iterate, &prod.best_response, lambda)?;
        Ok(self.set_current(next))
    }

    /// AFTRL restarted in phases with halving learning rate.
    ///
    /// A phase ends after the round in which
    /// `(eta_i alpha / beta) * sum |x_t - x_{t-1}|_q^2 > R_max / eta_i`, where
    /// the sum runs over the phase and `R_max = max R` over the simplex. The
    /// next phase starts from the regularizer's minimizer with fresh
    /// cumulative losses.
    pub fn doubling_aftrl_step(&mut self, observed: &LossVector) -> Result<Strategy> {
        self.expect_kind(&[LearnerKind::DoublingAftrl], "doubling_aftrl_step")?;
        check_len(self.n, observed.len())?;
        let reg = self.params.regularizer;
        let step = distance(observed.as_slice(), &self.prev_loss, reg.dual_norm());
        let r_max = reg.range(self.n);
        let alpha = self.params.alpha;
        let eta = self.eta;
        let round = self.rounds + 1;
        let state = self.doubling.as_mut().expect("doubling state present for DoublingAFTRL");
        state.accumulator += step * step;
        let crossed = eta * alpha / reg.beta() * state.accumulator > r_max / eta;
        self.record(observed);
        if crossed {
            let state = self.doubling.as_mut().expect("present");
            state.phase += 1;
            state.phase_start = round + 1;
            state.accumulator = 0.0;
            state.restarts.push(round);
            self.eta = state.eta0 / 2f64.powi(state.phase as i32);
            self.cumulative_loss.iter_mut().for_each(|c| *c = 0.0);
            let next = self.params.regularizer.argmin(&self.cumulative_loss, self.eta)?;
            return Ok(self.set_current(next));
        }
        let next = self.leader(self.eta)?;
        Ok(self.set_current(next))
    }
}

/// Uniform distribution over the minimizers of `observed` (ties within
/// [`TIE_TOL`]).
pub fn best_response(observed: &LossVector) -> Strategy {
    let min = observed.min();
    let ties: Vec<usize> =
        observed.as_slice().iter().enumerate().filter(|(_, &x)| x - min <= TIE_TOL).map(|(i, _)| i).collect();
    let mut w = vec![0.0; observed.len()];
    let share = 1.0 / ties.len() as f64;
    for i in ties {
        w[i] = share;
    }
    Strategy::new(w).expect("uniform over a nonempty tie set is a strategy")
}
