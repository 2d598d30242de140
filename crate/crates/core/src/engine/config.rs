use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::engine::sim::{make_random_game, record_oblivious_trace, run_vs_adversary, self_play, Adversary};
use crate::error::{Error, Result};
use crate::game::{LossScaling, MatrixGame};
use crate::learners::{LearnerKind, LearnerParams};
use crate::metrics;
use crate::nash::solve_zero_sum;
use crate::regularizer::Regularizer;
use crate::strategy::kl_divergence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSource {
    Random { n: usize, m: usize, seed: u64 },
    Csv(PathBuf),
}

impl GameSource {
    /// Loads or generates the payoff matrix. `seed` replaces the configured
    /// seed of a random game.
    pub fn load(&self, seed: Option<u64>) -> Result<MatrixGame> {
        match self {
            GameSource::Random { n, m, seed: own } => make_random_game(*n, *m, seed.unwrap_or(*own)),
            GameSource::Csv(path) => MatrixGame::load_csv(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub kind: LearnerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Sets `alpha = eta^(b - 1)` when `alpha` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default)]
    pub regularizer: Regularizer,
}

impl AgentSpec {
    pub fn new(kind: LearnerKind, eta: f64) -> Self {
        AgentSpec { kind, eta: Some(eta), alpha: None, b: None, regularizer: Regularizer::Entropy }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    /// The exploiting rate this spec denotes.
    pub fn resolved_alpha(&self) -> Result<f64> {
        match (self.alpha, self.b) {
            (Some(_), Some(_)) => Err(Error::InvalidParameter {
                name: "agent.b",
                reason: "give either alpha or b, not both".into(),
            }),
            (Some(a), None) => Ok(a),
            (None, Some(b)) => {
                let eta = self.eta.ok_or(Error::InvalidParameter {
                    name: "agent.eta",
                    reason: "needed to resolve alpha from b".into(),
                })?;
                if !b.is_finite() {
                    return Err(Error::InvalidParameter { name: "agent.b", reason: format!("must be finite, got {b}") });
                }
                Ok(eta.powf(b - 1.0))
            }
            (None, None) => Ok(self.kind.fixed_alpha().unwrap_or(0.0)),
        }
    }

    pub fn params(&self, horizon: usize) -> Result<LearnerParams> {
        let eta = match (self.kind.uses_eta(), self.eta) {
            (true, Some(eta)) => eta,
            (true, None) => {
                return Err(Error::InvalidParameter { name: "agent.eta", reason: format!("required for {}", self.kind) })
            }
            (false, _) => 1.0,
        };
        let params = LearnerParams {
            kind: self.kind,
            eta,
            alpha: self.resolved_alpha()?,
            regularizer: self.regularizer,
            horizon: Some(horizon),
        };
        params.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::InvalidParameter {
                name: match name {
                    "eta" => "agent.eta",
                    "alpha" => "agent.alpha",
                    "regularizer" => "agent.regularizer",
                    other => other,
                },
                reason,
            },
            other => other,
        })?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    /// Replay of a recorded MWU column sequence.
    ObliviousReplay {
        eta: f64,
        /// Rate of the MWU row player used while recording; defaults to `eta`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        recorder_eta: Option<f64>,
    },
    NonobliviousMwu { eta: f64 },
    /// The agent plays both sides.
    SelfPlay {},
}

impl AdversarySpec {
    pub fn eta(&self) -> Option<f64> {
        match self {
            AdversarySpec::ObliviousReplay { eta, .. } | AdversarySpec::NonobliviousMwu { eta } => Some(*eta),
            AdversarySpec::SelfPlay {} => None,
        }
    }

    pub fn is_self_play(&self) -> bool {
        matches!(self, AdversarySpec::SelfPlay {})
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    AverageLoss,
    ExternalRegret,
    DynamicRegret,
    AverageDynamicRegret,
    ForwardRegret,
    Exploitability,
    KlToNe,
}

impl Metric {
    pub const ADVERSARIAL: [Metric; 5] = [
        Metric::AverageLoss,
        Metric::ExternalRegret,
        Metric::DynamicRegret,
        Metric::AverageDynamicRegret,
        Metric::ForwardRegret,
    ];
    pub const SELF_PLAY: [Metric; 2] = [Metric::Exploitability, Metric::KlToNe];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AverageLoss => "average_loss",
            Metric::ExternalRegret => "external_regret",
            Metric::DynamicRegret => "dynamic_regret",
            Metric::AverageDynamicRegret => "average_dynamic_regret",
            Metric::ForwardRegret => "forward_regret",
            Metric::Exploitability => "exploitability",
            Metric::KlToNe => "kl_to_ne",
        }
    }

    pub fn applies_to_self_play(self) -> bool {
        Metric::SELF_PLAY.contains(&self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub game: GameSource,
    pub horizon: usize,
    pub agent: AgentSpec,
    pub adversary: AdversarySpec,
    /// Empty means every metric that applies to the adversary mode.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::InvalidParameter { name: "horizon", reason: format!("must be at least 2, got {}", self.horizon) });
        }
        if let GameSource::Random { n, m, .. } = self.game {
            if n < 2 || m < 2 {
                return Err(Error::InvalidParameter { name: "game.random", reason: format!("need n, m >= 2, got {n}x{m}") });
            }
        }
        self.agent.params(self.horizon)?;
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") })
            }
        };
        match &self.adversary {
            AdversarySpec::ObliviousReplay { eta, recorder_eta } => {
                positive("adversary.eta", *eta)?;
                if let Some(r) = recorder_eta {
                    positive("adversary.recorder_eta", *r)?;
                }
            }
            AdversarySpec::NonobliviousMwu { eta } => positive("adversary.eta", *eta)?,
            AdversarySpec::SelfPlay {} => {
                if !self.agent.kind.is_multiplicative() {
                    return Err(Error::InvalidParameter {
                        name: "agent.kind",
                        reason: format!("self-play needs MWU, OMWU, AMWU or LinearAMWU, got {}", self.agent.kind),
                    });
                }
            }
        }
        let self_play = self.adversary.is_self_play();
        if let Some(bad) = self.metrics.iter().find(|m| m.applies_to_self_play() != self_play) {
            return Err(Error::InvalidParameter {
                name: "metrics",
                reason: format!("`{}` does not apply to this adversary", bad.name()),
            });
        }
        Ok(())
    }

    pub fn requested_metrics(&self) -> Vec<Metric> {
        if !self.metrics.is_empty() {
            return self.metrics.clone();
        }
        if self.adversary.is_self_play() {
            Metric::SELF_PLAY.to_vec()
        } else {
            Metric::ADVERSARIAL.to_vec()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub metric: Metric,
    /// Entry `t - 1` belongs to round `t`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub series: Vec<MetricSeries>,
    /// Map applied to payoffs to obtain losses in adversarial runs.
    pub scaling: LossScaling,
}

impl RunOutput {
    pub fn get(&self, metric: Metric) -> Option<&[f64]> {
        self.series.iter().find(|s| s.metric == metric).map(|s| s.values.as_slice())
    }
}

/// Runs one configuration. `seed` overrides the random game's seed.
pub fn simulate(config: &SimulationConfig, seed: Option<u64>) -> Result<RunOutput> {
    config.validate()?;
    let game = config.game.load(seed)?;
    let params = config.agent.params(config.horizon)?;
    let metrics_wanted = config.requested_metrics();
    let horizon = config.horizon;

    if config.adversary.is_self_play() {
        let ne = solve_zero_sum(&game)?;
        let want_expl = metrics_wanted.contains(&Metric::Exploitability);
        let want_kl = metrics_wanted.contains(&Metric::KlToNe);
        let mut expl = Vec::with_capacity(if want_expl { horizon } else { 0 });
        let mut kl = Vec::with_capacity(if want_kl { horizon } else { 0 });
        self_play(&game, params, horizon, None, |_, f, y| {
            if want_expl {
                expl.push(metrics::exploitability(&game, f, y)?);
            }
            if want_kl {
                kl.push(kl_divergence(ne.f_star.as_slice(), f.as_slice())? + kl_divergence(ne.y_star.as_slice(), y.as_slice())?);
            }
            Ok(())
        })?;
        let series = metrics_wanted
            .iter()
            .map(|&metric| MetricSeries {
                metric,
                values: if metric == Metric::Exploitability { expl.clone() } else { kl.clone() },
            })
            .collect();
        return Ok(RunOutput { series, scaling: LossScaling::IDENTITY });
    }

    let scaling = LossScaling::for_game(&game);
    let loss_game = scaling.apply(&game);
    let adversary = match &config.adversary {
        AdversarySpec::ObliviousReplay { eta, recorder_eta } => {
            Adversary::Replay(record_oblivious_trace(&loss_game, *eta, horizon, *recorder_eta)?)
        }
        AdversarySpec::NonobliviousMwu { eta } => Adversary::NonObliviousMwu { eta: *eta },
        AdversarySpec::SelfPlay {} => unreachable!("handled above"),
    };
    let trace = run_vs_adversary(&loss_game, params, &adversary, horizon)?;
    let forward_eta = match params.kind {
        LearnerKind::ProdBr | LearnerKind::BestResponse => {
            crate::learners::ProdState::for_horizon(loss_game.rows(), horizon).ftrl_eta
        }
        _ => params.eta,
    };
    let series = metrics_wanted
        .iter()
        .map(|&metric| {
            let values = match metric {
                Metric::AverageLoss => metrics::average_loss(&trace),
                Metric::ExternalRegret => metrics::external_regret(&trace),
                Metric::DynamicRegret => metrics::dynamic_regret(&trace),
                Metric::AverageDynamicRegret => metrics::average_dynamic_regret(&trace),
                Metric::ForwardRegret => metrics::forward_regret(&trace, params.regularizer, forward_eta)?,
                Metric::Exploitability | Metric::KlToNe => unreachable!("rejected by validate"),
            };
            Ok(MetricSeries { metric, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutput { series, scaling })
}
