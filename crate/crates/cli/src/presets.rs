//! Built-in experiment grids and their on-disk outputs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use stratlearn::engine::{grid_run, AdversarySpec, AgentSpec, GameSource, GridJob, Metric, SimulationConfig, SplitMix64};
use stratlearn::nash::spectral_radius_at_ne;
use stratlearn::{solve_zero_sum, LearnerKind, MatrixGame, NashSolution};

use crate::csv_out::{emit_csv, NamedSeries};

/// Adversary learning rates `0.5, 0.45, ..., 0.05`.
pub const ADVERSARY_ETAS: [f64; 10] = [0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05];
pub const GAME_SIZE: usize = 20;
pub const ADVERSARIAL_HORIZON: usize = 10_000;
pub const LAST_ROUND_HORIZON: usize = 100_000;
pub const COMMON_ETA: f64 = 0.01;
pub const SPECTRAL_ETA: f64 = 0.1;
pub const SPECTRAL_BS: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    ObliviousLoss,
    NonobliviousRegret,
    LastRound,
    SpectralCertificate,
}

impl PresetName {
    pub const ALL: [PresetName; 4] =
        [PresetName::ObliviousLoss, PresetName::NonobliviousRegret, PresetName::LastRound, PresetName::SpectralCertificate];

    pub fn name(self) -> &'static str {
        match self {
            PresetName::ObliviousLoss => "oblivious-loss",
            PresetName::NonobliviousRegret => "nonoblivious-regret",
            PresetName::LastRound => "last-round",
            PresetName::SpectralCertificate => "spectral-certificate",
        }
    }

    pub fn csv_file(self) -> &'static str {
        match self {
            PresetName::ObliviousLoss => "oblivious_loss.csv",
            PresetName::NonobliviousRegret => "nonoblivious_regret.csv",
            PresetName::LastRound => "last_round.csv",
            PresetName::SpectralCertificate => "spectral_certificate.csv",
        }
    }

    pub fn default_horizon(self) -> Option<usize> {
        match self {
            PresetName::ObliviousLoss | PresetName::NonobliviousRegret => Some(ADVERSARIAL_HORIZON),
            PresetName::LastRound => Some(LAST_ROUND_HORIZON),
            PresetName::SpectralCertificate => None,
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown preset `{given}`; valid presets are: {}", valid_names())]
pub struct UnknownPreset {
    pub given: String,
}

fn valid_names() -> String {
    PresetName::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
}

impl FromStr for PresetName {
    type Err = UnknownPreset;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetName::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| UnknownPreset { given: s.to_string() })
    }
}

/// A labelled agent of a preset grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetAgent {
    pub label: &'static str,
    pub spec: AgentSpec,
}

/// MWU, OMWU and AMWU at the common rate, plus OMWU at rate one, whose step
/// `eta * alpha` matches AMWU's.
pub fn multiplicative_agents() -> Vec<PresetAgent> {
    vec![
        PresetAgent { label: "MWU", spec: AgentSpec::new(LearnerKind::Mwu, COMMON_ETA) },
        PresetAgent { label: "OMWU", spec: AgentSpec::new(LearnerKind::Omwu, COMMON_ETA) },
        PresetAgent { label: "AMWU", spec: AgentSpec::new(LearnerKind::Amwu, COMMON_ETA).with_alpha(100.0) },
        PresetAgent { label: "OMWU1", spec: AgentSpec::new(LearnerKind::Omwu, 1.0) },
    ]
}

pub fn adversarial_agents() -> Vec<PresetAgent> {
    let mut agents = multiplicative_agents();
    agents.push(PresetAgent {
        label: "ProdBR",
        spec: AgentSpec { kind: LearnerKind::ProdBr, eta: None, alpha: None, b: None, regularizer: Default::default() },
    });
    agents
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOptions {
    pub horizon: Option<usize>,
    /// Rounds between kept CSV rows; defaults to `horizon / 1000`.
    pub stride: Option<usize>,
    pub parallelism: usize,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions { horizon: None, stride: None, parallelism: 1 }
    }
}

/// One cell of an expanded grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEntry {
    pub id: String,
    pub learner: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary_eta: Option<f64>,
    pub config: SimulationConfig,
}

/// Expands a simulation preset into its grid. `None` for the spectral preset,
/// which does not simulate.
pub fn expand(name: PresetName, horizon: usize) -> Option<Vec<GridEntry>> {
    let game = GameSource::Random { n: GAME_SIZE, m: GAME_SIZE, seed: 0 };
    let mut out = Vec::new();
    let adversarial = |adv: fn(f64) -> AdversarySpec, metrics: Vec<Metric>, out: &mut Vec<GridEntry>| {
        for agent in adversarial_agents() {
            for eta in ADVERSARY_ETAS {
                out.push(GridEntry {
                    id: format!("{}@{eta}", agent.label),
                    learner: agent.label.into(),
                    adversary_eta: Some(eta),
                    config: SimulationConfig {
                        game: game.clone(),
                        horizon,
                        agent: agent.spec.clone(),
                        adversary: adv(eta),
                        metrics: metrics.clone(),
                        output: None,
                    },
                });
            }
        }
    };
    match name {
        PresetName::ObliviousLoss => adversarial(
            |eta| AdversarySpec::ObliviousReplay { eta, recorder_eta: None },
            vec![Metric::AverageLoss],
            &mut out,
        ),
        PresetName::NonobliviousRegret => adversarial(
            |eta| AdversarySpec::NonobliviousMwu { eta },
            vec![Metric::DynamicRegret, Metric::AverageDynamicRegret],
            &mut out,
        ),
        PresetName::LastRound => {
            for agent in multiplicative_agents() {
                out.push(GridEntry {
                    id: agent.label.into(),
                    learner: agent.label.into(),
                    adversary_eta: None,
                    config: SimulationConfig {
                        game: game.clone(),
                        horizon,
                        agent: agent.spec,
                        adversary: AdversarySpec::SelfPlay {},
                        metrics: Metric::SELF_PLAY.to_vec(),
                        output: None,
                    },
                });
            }
        }
        PresetName::SpectralCertificate => return None,
    }
    Some(out)
}

/// The matching pennies payoff matrix.
pub fn matching_pennies() -> MatrixGame {
    MatrixGame::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).expect("static matrix")
}

/// Smallest equilibrium mass treated as interior.
pub const INTERIOR_MASS: f64 = 1e-6;

/// First seeded 3x3 game whose equilibrium is fully mixed for both players.
/// Candidate seeds are drawn from a SplitMix64 stream started at `seed`.
pub fn interior_game(seed: u64) -> stratlearn::Result<(MatrixGame, NashSolution, u64)> {
    let mut rng = SplitMix64::new(seed);
    loop {
        let candidate = rng.next_u64();
        let game = stratlearn::engine::make_random_game(3, 3, candidate)?;
        let ne = solve_zero_sum(&game)?;
        let interior = ne.f_star.as_slice().iter().chain(ne.y_star.as_slice()).all(|&p| p > INTERIOR_MASS);
        if interior {
            return Ok((game, ne, candidate));
        }
    }
}

/// `(label, eta, alpha)` triples certified by the spectral preset.
pub fn spectral_learners() -> Vec<(String, f64, f64)> {
    let mut out = vec![("AMWU".to_string(), SPECTRAL_ETA, 10.0), ("MWU".to_string(), SPECTRAL_ETA, 0.0)];
    for b in SPECTRAL_BS {
        out.push((format!("AMWU_b{b}"), SPECTRAL_ETA, SPECTRAL_ETA.powf(b - 1.0)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub id: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub preset: PresetName,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    pub grid: serde_json::Value,
    pub library_version: &'static str,
    pub files: Vec<String>,
    pub failures: Vec<Failure>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Runs a preset, writing its CSV and `manifest.json` into `out_dir`. Run
/// failures do not abort the preset; they are listed in the manifest.
pub fn run_preset(name: PresetName, out_dir: &Path, seeds: &[u64], options: &PresetOptions) -> anyhow::Result<Manifest> {
    if seeds.is_empty() {
        anyhow::bail!("at least one seed is required");
    }
    std::fs::create_dir_all(out_dir)?;
    let (series, manifest) = match name {
        PresetName::SpectralCertificate => spectral(seeds),
        _ => simulated(name, seeds, options)?,
    };
    let csv_path: PathBuf = out_dir.join(name.csv_file());
    emit_csv(&series, &csv_path)?;
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(out_dir.join(MANIFEST_FILE), text + "\n")?;
    Ok(manifest)
}

fn simulated(name: PresetName, seeds: &[u64], options: &PresetOptions) -> anyhow::Result<(Vec<NamedSeries>, Manifest)> {
    let horizon = options.horizon.or(name.default_horizon()).expect("simulation presets have a horizon");
    let stride = options.stride.unwrap_or((horizon / 1000).max(1));
    let grid = expand(name, horizon).expect("simulation preset");
    let jobs: Vec<GridJob> =
        grid.iter().map(|e| GridJob { id: e.id.clone(), config: e.config.clone(), seeds: seeds.to_vec() }).collect();
    let results = grid_run(&jobs, options.parallelism)?;

    let mut series = Vec::new();
    let mut failures = Vec::new();
    for (entry, result) in grid.iter().zip(results) {
        for (seed, run) in result.runs {
            match run {
                Ok(output) => {
                    for s in output.series {
                        series.push(NamedSeries::from_values(
                            entry.learner.clone(),
                            s.metric.name(),
                            seed,
                            entry.adversary_eta,
                            &s.values,
                            stride,
                        ));
                    }
                }
                Err(e) => failures.push(Failure { id: entry.id.clone(), seed, error: e.to_string() }),
            }
        }
    }
    let manifest = Manifest {
        preset: name,
        seeds: seeds.to_vec(),
        horizon: Some(horizon),
        stride: Some(stride),
        grid: serde_json::to_value(&grid)?,
        library_version: stratlearn_version(),
        files: vec![name.csv_file().into()],
        failures,
    };
    Ok((series, manifest))
}

/// Spectral radii at the equilibrium, one row per learner and game. Seeded
/// 3x3 games report metric `spectral_radius`; matching pennies is reported
/// once per seed as `spectral_radius_pennies`.
fn spectral(seeds: &[u64]) -> (Vec<NamedSeries>, Manifest) {
    let learners = spectral_learners();
    let pennies = matching_pennies();
    let pennies_ne = solve_zero_sum(&pennies);
    let mut series = Vec::new();
    let mut failures = Vec::new();
    let mut games = Vec::new();
    for &seed in seeds {
        let seeded = interior_game(seed);
        if let Ok((_, _, used)) = &seeded {
            games.push(serde_json::json!({ "seed": seed, "game_seed": used }));
        }
        for (label, eta, alpha) in &learners {
            let point = |metric: &str, value: f64| NamedSeries {
                learner: label.clone(),
                metric: metric.into(),
                seed,
                adversary_eta: None,
                points: vec![(1, value)],
            };
            let radius = seeded.as_ref().map_err(Clone::clone).and_then(|(g, ne, _)| spectral_radius_at_ne(g, ne, *eta, *alpha));
            match radius {
                Ok(r) => series.push(point("spectral_radius", r)),
                Err(e) => failures.push(Failure { id: label.clone(), seed, error: e.to_string() }),
            }
            match pennies_ne.as_ref().map_err(Clone::clone).and_then(|ne| spectral_radius_at_ne(&pennies, ne, *eta, *alpha)) {
                Ok(r) => series.push(point("spectral_radius_pennies", r)),
                Err(e) => failures.push(Failure { id: format!("{label}/pennies"), seed, error: e.to_string() }),
            }
        }
    }
    let grid = serde_json::json!({
        "learners": learners.iter().map(|(l, e, a)| serde_json::json!({"label": l, "eta": e, "alpha": a})).collect::<Vec<_>>(),
        "games": games,
    });
    let manifest = Manifest {
        preset: PresetName::SpectralCertificate,
        seeds: seeds.to_vec(),
        horizon: None,
        stride: None,
        grid,
        library_version: stratlearn_version(),
        files: vec![PresetName::SpectralCertificate.csv_file().into()],
        failures,
    };
    (series, manifest)
}

fn stratlearn_version() -> &'static str {
    stratlearn::VERSION
}
