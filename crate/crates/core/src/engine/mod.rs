//! Deterministic simulation loops, random games, configuration, and the
//! parallel seed grid.

pub mod config;
pub mod grid;
pub mod rng;
pub mod sim;

pub use config::{simulate, AdversarySpec, AgentSpec, GameSource, Metric, MetricSeries, RunOutput, SimulationConfig};
pub use grid::{grid_run, GridJob, GridResult, SeriesSummary};
pub use rng::SplitMix64;
pub use sim::{make_random_game, record_oblivious_trace, run_self_play, run_vs_adversary, self_play, Adversary};
