//! ReliefF for binary labels.
//!
//! Every instance is an anchor. For each anchor the `k` nearest hits (same
//! class, self excluded) and `k` nearest misses are found under the Manhattan
//! distance of per-attribute diffs; numeric diffs are min-max normalized,
//! categorical diffs are 0/1. Weights accumulate
//! `(sum_miss diff - sum_hit diff) / (m k)` and so lie in `[-1, 1]`.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rayon::prelude::*;

use super::measures::attribute_codes;
use crate::dataio::{Column, Table};
use crate::error::{Error, Result};
use crate::seed;

/// Attribute matrix in `[0, 1]` (numeric) or level codes (categorical).
pub(crate) struct DiffSpace {
    names: Vec<String>,
    numeric: Vec<bool>,
    values: Vec<Vec<f64>>,
}

impl DiffSpace {
    pub(crate) fn from_table(table: &Table) -> Result<Self> {
        let mut names = Vec::new();
        let mut numeric = Vec::new();
        let mut values = Vec::new();
        for name in table.feature_names() {
            match table.column(name).expect("feature exists") {
                Column::Numeric(v) => {
                    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let range = hi - lo;
                    values.push(
                        v.iter()
                            .map(|&x| if range > 0.0 { (x - lo) / range } else { 0.0 })
                            .collect(),
                    );
                    numeric.push(true);
                }
                Column::Categorical(_) => {
                    let codes = attribute_codes(table, name, None)?;
                    values.push(codes.into_iter().map(|c| c as f64).collect());
                    numeric.push(false);
                }
            }
            names.push(name.to_string());
        }
        Ok(DiffSpace {
            names,
            numeric,
            values,
        })
    }

    #[inline]
    pub(crate) fn diff(&self, attr: usize, a: usize, b: usize) -> f64 {
        let (x, y) = (self.values[attr][a], self.values[attr][b]);
        if self.numeric[attr] {
            (x - y).abs()
        } else if x == y {
            0.0
        } else {
            1.0
        }
    }

    pub(crate) fn distance(&self, a: usize, b: usize) -> f64 {
        (0..self.names.len()).map(|f| self.diff(f, a, b)).sum()
    }
}

/// ReliefF weights using every row as an anchor.
pub fn weight_relief(table: &Table, k_neighbors: usize) -> Result<BTreeMap<String, f64>> {
    relief_impl(table, k_neighbors, None)
}

/// ReliefF over `m` anchors sampled without replacement.
pub fn weight_relief_sampled(
    table: &Table,
    k_neighbors: usize,
    m: usize,
    seed: u64,
) -> Result<BTreeMap<String, f64>> {
    if m == 0 {
        return Err(Error::config("relief needs at least one anchor"));
    }
    relief_impl(table, k_neighbors, Some((m, seed)))
}

fn relief_impl(
    table: &Table,
    k: usize,
    sampling: Option<(usize, u64)>,
) -> Result<BTreeMap<String, f64>> {
    if k == 0 {
        return Err(Error::config("relief k must be at least 1"));
    }
    // neighbour ties resolve by canonical row order, so input order is irrelevant
    let table = table.select_rows(&table.canonical_order());
    let labels = table.labels();
    let n = labels.len();
    let pos = labels.iter().filter(|&&y| y).count();
    if pos < k + 1 || n - pos < k + 1 {
        return Err(Error::data(format!(
            "relief needs at least k+1 = {} rows per class ({pos} positive, {} negative)",
            k + 1,
            n - pos
        )));
    }
    let space = DiffSpace::from_table(&table)?;
    let p = space.names.len();

    let anchors: Vec<usize> = match sampling {
        None => (0..n).collect(),
        Some((m, s)) => {
            let mut a = sample(&mut seed::stage_rng(s, "relief", 0), n, m.min(n)).into_vec();
            a.sort_unstable();
            a
        }
    };
    let m = anchors.len() as f64;
    let scale = 1.0 / (m * k as f64);

    let contributions: Vec<Vec<f64>> = anchors
        .par_iter()
        .map(|&i| {
            let mut hits = Vec::with_capacity(n);
            let mut misses = Vec::with_capacity(n);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = space.distance(i, j);
                if labels[j] == labels[i] {
                    hits.push((d, j));
                } else {
                    misses.push((d, j));
                }
            }
            let nearest = |v: &mut Vec<(f64, usize)>| {
                let by =
                    |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if v.len() > k {
                    v.select_nth_unstable_by(k - 1, by);
                    v.truncate(k);
                }
                v.sort_by(by);
            };
            nearest(&mut hits);
            nearest(&mut misses);
            (0..p)
                .map(|f| {
                    let miss: f64 = misses.iter().map(|&(_, j)| space.diff(f, i, j)).sum();
                    let hit: f64 = hits.iter().map(|&(_, j)| space.diff(f, i, j)).sum();
                    (miss - hit) * scale
                })
                .collect()
        })
        .collect();

    let mut weights = vec![0.0; p];
    for c in &contributions {
        for (w, x) in weights.iter_mut().zip(c) {
            *w += x;
        }
    }
    Ok(space
        .names
        .into_iter()
        .zip(weights.into_iter().map(|w| w.clamp(-1.0, 1.0)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{ColumnSchema, Schema};

    fn two_clusters(n_per_class: usize) -> Table {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::categorical("copy"),
            ColumnSchema::numeric("flat"),
            ColumnSchema::label("y", "1"),
        ])
        .unwrap();
        let mut x = Vec::new();
        let mut copy = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_per_class {
            x.push(i as f64 * 0.01);
            copy.push("0".to_string());
            y.push("0".to_string());
            x.push(10.0 + i as f64 * 0.01);
            copy.push("1".to_string());
            y.push("1".to_string());
        }
        let n = y.len();
        Table::new(
            schema,
            vec![
                Column::Numeric(x),
                Column::Categorical(copy),
                Column::Numeric(vec![4.2; n]),
                Column::Categorical(y),
            ],
            "0",
        )
        .unwrap()
    }

    #[test]
    fn label_copy_scores_one_and_constant_zero() {
        let w = weight_relief(&two_clusters(10), 1).unwrap();
        assert!((w["copy"] - 1.0).abs() < 1e-12);
        assert_eq!(w["flat"], 0.0);
        assert!(w["x"] > 0.9);
    }

    #[test]
    fn small_class_is_rejected() {
        assert!(weight_relief(&two_clusters(3), 3).is_err());
        assert!(weight_relief(&two_clusters(4), 3).is_ok());
    }

    #[test]
    fn sampled_anchors_are_seeded() {
        let t = two_clusters(20);
        let a = weight_relief_sampled(&t, 2, 10, 5).unwrap();
        let b = weight_relief_sampled(&t, 2, 10, 5).unwrap();
        assert_eq!(a, b);
        let all = weight_relief_sampled(&t, 2, 1000, 5).unwrap();
        assert_eq!(all, weight_relief(&t, 2).unwrap());
    }
}
