//! Dense zero-sum matrix games.
//!
//! The row player is the maximizer of `f^T A y`, the column player the
//! minimizer. In the adversarial experiments the same matrix is read as the
//! row player's loss, so `A y` is the loss vector the row player faces.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{check_len, dot, LossVector, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    /// Row-major payoff entries.
    payoff: Vec<f64>,
}

impl MatrixGame {
    pub fn new(rows: usize, cols: usize, payoff: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter {
                name: "payoff",
                reason: "matrix must have at least one row and one column".into(),
            });
        }
        check_len(rows * cols, payoff.len())?;
        if payoff.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("payoff matrix"));
        }
        Ok(MatrixGame { rows, cols, payoff })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut payoff = Vec::with_capacity(n * m);
        for r in rows {
            check_len(m, r.len())?;
            payoff.extend_from_slice(r);
        }
        MatrixGame::new(n, m, payoff)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.payoff[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.payoff[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.payoff
    }

    /// `A y` for an arbitrary column vector (not necessarily a strategy).
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), y)).collect()
    }

    /// `A^T f` for an arbitrary row vector.
    pub fn apply_transpose(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &fi) in f.iter().enumerate() {
            if fi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += fi * a;
            }
        }
        out
    }

    /// Row player's expected payoff per pure row against `y`.
    pub fn row_payoffs(&self, y: &Strategy) -> Result<Vec<f64>> {
        check_len(self.cols, y.len())?;
        Ok(self.apply(y.as_slice()))
    }

    /// Expected payoff per pure column when the row player mixes `f`.
    pub fn col_payoffs(&self, f: &Strategy) -> Result<Vec<f64>> {
        check_len(self.rows, f.len())?;
        Ok(self.apply_transpose(f.as_slice()))
    }

    /// `f^T A y`.
    pub fn value_at(&self, f: &Strategy, y: &Strategy) -> Result<f64> {
        Ok(dot(f.as_slice(), &self.row_payoffs(y)?))
    }

    pub fn transpose(&self) -> MatrixGame {
        let mut payoff = Vec::with_capacity(self.payoff.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                payoff.push(self.entry(i, j));
            }
        }
        MatrixGame { rows: self.cols, cols: self.rows, payoff }
    }

    /// Smallest and largest entry.
    pub fn entry_range(&self) -> (f64, f64) {
        self.payoff
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)))
    }

    /// Parses comma-separated rows, one per line, no header. Blank lines are
    /// skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: lineno + 1,
                        reason: format!("`{}`: {e}", cell.trim()),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        reason: format!("expected {} entries, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse { line: 0, reason: "no rows".into() });
        }
        MatrixGame::from_rows(&rows)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        MatrixGame::from_csv_str(&text)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|a| format!("{a:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Positive affine map `a -> (a - offset) * scale` that sends a game's entry
/// range into `[0, 1]`. Identity when the range already lies there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossScaling {
    pub offset: f64,
    pub scale: f64,
}

impl LossScaling {
    pub const IDENTITY: LossScaling = LossScaling { offset: 0.0, scale: 1.0 };

    pub fn for_game(game: &MatrixGame) -> Self {
        let (lo, hi) = game.entry_range();
        if lo >= 0.0 && hi <= 1.0 {
            return LossScaling::IDENTITY;
        }
        if hi > lo {
            LossScaling { offset: lo, scale: 1.0 / (hi - lo) }
        } else {
            // Constant matrix outside [0, 1]: every loss is the same, send it to 0.
            LossScaling { offset: lo, scale: 1.0 }
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == LossScaling::IDENTITY
    }

    pub fn map(&self, a: f64) -> f64 {
        ((a - self.offset) * self.scale).clamp(0.0, 1.0)
    }

    pub fn apply(&self, game: &MatrixGame) -> MatrixGame {
        if self.is_identity() {
            return game.clone();
        }
        let payoff = game.entries().iter().map(|&a| self.map(a)).collect();
        MatrixGame { rows: game.rows, cols: game.cols, payoff }
    }
}

/// Loss vector `A y` for the row player when `A` already lies in `[0, 1]`.
pub fn row_loss(loss_game: &MatrixGame, y: &Strategy) -> Result<LossVector> {
    let mut v = loss_game.row_payoffs(y)?;
    // Convex combinations of [0, 1] entries can round a hair outside the range.
    for a in v.iter_mut() {
        *a = a.clamp(0.0, 1.0);
    }
    LossVector::new(v)
}
