//! Binary CART trees grown greedily on an encoded design matrix.
//!
//! The same grower serves classification (Gini impurity on 0/1 targets) and
//! the regression trees inside gradient boosting (squared error on
//! gradients, Newton leaf values). Candidate thresholds are midpoints between
//! consecutive distinct sorted values; rows with `x < threshold` go left.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Features used by any split.
    pub fn split_features(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub max_features: Option<usize>,
}

pub enum Target<'a> {
    /// 0/1 labels, Gini impurity, leaf = positive fraction.
    Gini(&'a [f64]),
    /// Squared error on `grad`; leaf = sum(grad) / sum(hess).
    Newton { grad: &'a [f64], hess: &'a [f64] },
}

impl Target<'_> {
    fn value(&self, i: usize) -> f64 {
        match self {
            Target::Gini(y) => y[i],
            Target::Newton { grad, .. } => grad[i],
        }
    }

    /// Additive node score; a split's gain is `score(L) + score(R) - score(parent)`.
    fn score(&self, n: f64, s: f64) -> f64 {
        match self {
            Target::Gini(_) => -2.0 * s * (n - s) / n,
            Target::Newton { .. } => s * s / n,
        }
    }

    fn leaf(&self, rows: &[usize]) -> f64 {
        match self {
            Target::Gini(y) => rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64,
            Target::Newton { grad, hess } => {
                let g: f64 = rows.iter().map(|&i| grad[i]).sum();
                let h: f64 = rows.iter().map(|&i| hess[i]).sum();
                g / h.max(1e-12)
            }
        }
    }
}

const MIN_GAIN: f64 = 1e-12;

struct Grower<'a, R> {
    /// `cols[f][slot]`: value of feature `f` for the sample in `slot`.
    cols: Vec<Vec<f64>>,
    /// Target value per slot.
    values: Vec<f64>,
    rows: Vec<usize>,
    target: Target<'a>,
    params: TreeParams,
    rng: Option<&'a mut R>,
    nodes: Vec<Node>,
}

/// Grows a tree on `rows` (duplicates allowed, as in bootstrap samples).
/// `rng` is only consulted when `params.max_features` subsamples features.
///
/// Each feature's slots are sorted once at the root and stably partitioned
/// at every split, so nodes never re-sort.
pub fn grow<R: Rng>(
    x: &Matrix,
    target: Target<'_>,
    rows: Vec<usize>,
    params: TreeParams,
    rng: Option<&mut R>,
) -> Tree {
    let cols: Vec<Vec<f64>> = (0..x.cols())
        .map(|f| rows.iter().map(|&i| x.get(i, f)).collect())
        .collect();
    let values: Vec<f64> = rows.iter().map(|&i| target.value(i)).collect();
    let sorted: Vec<Vec<u32>> = cols
        .iter()
        .map(|col| {
            let mut order: Vec<u32> = (0..rows.len() as u32).collect();
            order.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]));
            order
        })
        .collect();
    let mut g = Grower {
        cols,
        values,
        rows,
        target,
        params,
        rng,
        nodes: Vec::new(),
    };
    g.build(sorted, 0);
    Tree { nodes: g.nodes }
}

impl<R: Rng> Grower<'_, R> {
    fn build(&mut self, sorted: Vec<Vec<u32>>, depth: usize) -> usize {
        let id = self.nodes.len();
        let node_rows: Vec<usize> = match sorted.first() {
            Some(s) => s.iter().map(|&slot| self.rows[slot as usize]).collect(),
            None => Vec::new(),
        };
        self.nodes.push(Node::Leaf {
            value: self.target.leaf(&node_rows),
        });
        let n = node_rows.len();
        if depth >= self.params.max_depth || n < 2 * self.params.min_leaf {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&sorted) else {
            return id;
        };
        let col = &self.cols[feature];
        let (left_sorted, right_sorted): (Vec<Vec<u32>>, Vec<Vec<u32>>) = sorted
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .partition(|&slot| col[slot as usize] < threshold)
            })
            .unzip();
        let left = self.build(left_sorted, depth + 1);
        let right = self.build(right_sorted, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.cols.len();
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut f = sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, sorted: &[Vec<u32>]) -> Option<(usize, f64)> {
        let len = sorted[0].len();
        let n = len as f64;
        let total: f64 = sorted[0].iter().map(|&s| self.values[s as usize]).sum();
        let parent = self.target.score(n, total);
        let min_leaf = self.params.min_leaf.max(1);
        let mut best: Option<(f64, usize, f64)> = None;
        for f in self.candidate_features() {
            let col = &self.cols[f];
            let order = &sorted[f];
            let value = |k: usize| col[order[k] as usize];
            if value(0) == value(len - 1) {
                continue;
            }
            let mut left_sum = 0.0;
            for i in 0..len - 1 {
                left_sum += self.values[order[i] as usize];
                let n_left = i + 1;
                let n_right = len - n_left;
                if n_left < min_leaf {
                    continue;
                }
                if n_right < min_leaf {
                    break;
                }
                let (here, next) = (value(i), value(i + 1));
                if here == next {
                    continue;
                }
                let gain = self.target.score(n_left as f64, left_sum)
                    + self.target.score(n_right as f64, total - left_sum)
                    - parent;
                if gain > MIN_GAIN && best.map_or(true, |(g, _, _)| gain > g) {
                    best = Some((gain, f, here + (next - here) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}
