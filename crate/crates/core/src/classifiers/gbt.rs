//! Gradient-boosted regression trees under logistic loss.
//!
//! Each round fits a depth-limited tree to the negative gradient `y - p` and
//! sets leaf values by a Newton step `sum(y - p) / sum(p (1 - p))`. The
//! shrunken step is halved until the training loss does not increase, so the
//! loss history is non-increasing.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::encoding::Matrix;
use super::tree::{grow, Target, Tree, TreeParams};
use super::{log_loss, sigmoid};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub learning_rate: f64,
    /// Row fraction drawn without replacement per round.
    pub subsample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booster {
    base_score: f64,
    trees: Vec<(f64, Tree)>,
    /// Mean training log loss after the prior and after every round.
    train_loss: Vec<f64>,
}

const MAX_HALVINGS: usize = 30;

impl Booster {
    pub fn fit(x: &Matrix, y: &[f64], params: &BoostParams, seed: u64) -> Booster {
        let n = x.rows();
        let prior = (y.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
        let base_score = (prior / (1.0 - prior)).ln();
        let mut margin = vec![base_score; n];
        let mut loss = mean_loss(&margin, y);
        let mut train_loss = vec![loss];
        let mut trees = Vec::with_capacity(params.n_rounds);
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            max_features: None,
        };
        let m = ((params.subsample * n as f64).round() as usize).clamp(1, n);
        for round in 0..params.n_rounds {
            let p: Vec<f64> = margin.iter().map(|&f| sigmoid(f)).collect();
            let grad: Vec<f64> = y.iter().zip(&p).map(|(y, p)| y - p).collect();
            let hess: Vec<f64> = p.iter().map(|p| p * (1.0 - p)).collect();
            let rows: Vec<usize> = if m < n {
                let mut rng = seed::stage_rng(seed, "boost_round", round as u64);
                let mut r = sample(&mut rng, n, m).into_vec();
                r.sort_unstable();
                r
            } else {
                (0..n).collect()
            };
            let tree = grow::<rand_chacha::ChaCha8Rng>(
                x,
                Target::Newton {
                    grad: &grad,
                    hess: &hess,
                },
                rows,
                tree_params,
                None,
            );
            let step: Vec<f64> = (0..n).map(|i| tree.predict(x.row(i))).collect();
            let mut scale = params.learning_rate;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = margin
                    .iter()
                    .zip(&step)
                    .map(|(f, s)| f + scale * s)
                    .collect();
                let trial_loss = mean_loss(&trial, y);
                if trial_loss <= loss {
                    accepted = Some((trial, trial_loss));
                    break;
                }
                scale /= 2.0;
            }
            match accepted {
                Some((trial, trial_loss)) => {
                    margin = trial;
                    loss = trial_loss;
                    trees.push((scale, tree));
                }
                None => trees.push((0.0, tree)),
            }
            train_loss.push(loss);
        }
        Booster {
            base_score,
            trees,
            train_loss,
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        self.base_score
            + self
                .trees
                .iter()
                .map(|(s, t)| s * t.predict(x))
                .sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }

    pub fn train_loss(&self) -> &[f64] {
        &self.train_loss
    }
}

fn mean_loss(margin: &[f64], y: &[f64]) -> f64 {
    margin
        .iter()
        .zip(y)
        .map(|(&f, &y)| log_loss(f, y))
        .sum::<f64>()
        / margin.len() as f64
}
