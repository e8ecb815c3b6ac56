//! Bagged Gini trees with per-split feature subsampling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encoding::Matrix;
use super::tree::{grow, Target, Tree, TreeParams};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features per split; 0 means `floor(sqrt(d))`.
    pub max_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    /// Trees are independent and seeded by index, so the parallel fit equals
    /// the serial one.
    pub fn fit(x: &Matrix, y: &[f64], params: &ForestParams, seed: u64) -> Forest {
        let n = x.rows();
        let d = x.cols();
        let mtry = if params.max_features == 0 {
            ((d as f64).sqrt().floor() as usize).max(1)
        } else {
            params.max_features.min(d)
        };
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            max_features: Some(mtry),
        };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::stage_rng(seed, "forest_tree", t as u64);
                let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                grow(x, Target::Gini(y), rows, tree_params, Some(&mut rng))
            })
            .collect();
        Forest { trees }
    }

    /// Fraction of trees voting positive.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let votes = self.trees.iter().filter(|t| t.predict(x) >= 0.5).count();
        votes as f64 / self.trees.len() as f64
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}
