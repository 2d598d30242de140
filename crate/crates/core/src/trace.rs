use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::strategy::{inner, LossVector, Strategy};

/// One scored round: the strategy committed, the loss vector revealed, and
/// the loss suffered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub strategy: Strategy,
    pub loss: LossVector,
    pub realized: f64,
}

/// Round-by-round record of one simulation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    rounds: Vec<Round>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn with_capacity(horizon: usize) -> Self {
        Trace { rounds: Vec::with_capacity(horizon) }
    }

    pub fn push(&mut self, strategy: Strategy, loss: LossVector) -> Result<()> {
        let realized = inner(&strategy, &loss)?;
        self.rounds.push(Round { strategy, loss, realized });
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn strategies(&self) -> impl Iterator<Item = &Strategy> {
        self.rounds.iter().map(|r| &r.strategy)
    }

    pub fn losses(&self) -> impl Iterator<Item = &LossVector> {
        self.rounds.iter().map(|r| &r.loss)
    }

    pub fn loss_stream(&self) -> Vec<LossVector> {
        self.losses().cloned().collect()
    }

    pub fn total_loss(&self) -> f64 {
        self.rounds.iter().map(|r| r.realized).sum()
    }

    /// Mean realized loss over the whole horizon.
    pub fn average_loss(&self) -> f64 {
        if self.rounds.is_empty() {
            return 0.0;
        }
        self.total_loss() / self.rounds.len() as f64
    }
}
