//! Online learning against strategic, no-regret adversaries.
//!
//! The crate provides simplex learners that exploit slowly moving opponents
//! (accurate FTRL, accurate mirror descent, accurate multiplicative weights,
//! Prod with best response) next to their classical baselines, post-hoc
//! regret and convergence metrics, an exact zero-sum game solver, and a
//! deterministic simulation engine.

pub mod engine;
pub mod error;
pub mod game;
pub mod learners;
pub mod metrics;
pub mod nash;
pub mod regularizer;
pub mod strategy;
pub mod trace;

/// Crate version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use game::{LossScaling, MatrixGame};
pub use learners::{best_response, LearnerKind, LearnerParams, LearnerState, Side};
pub use nash::{solve_zero_sum, NashSolution};
pub use regularizer::Regularizer;
pub use strategy::{inner, kl_divergence, l_norm, LossVector, Norm, Strategy};
pub use trace::{Round, Trace};
