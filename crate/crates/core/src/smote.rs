//! Minority oversampling by interpolation between minority neighbours.
//!
//! Mixed-type rows follow the SMOTE-NC convention: numeric cells are
//! interpolated along the anchor-neighbour segment, categorical cells take the
//! majority value among the anchor's `k` neighbours (ties keep the anchor's).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::{Cell, Column, Table};
use crate::error::{Error, Result};
use crate::seed;
use crate::weighting::DiffSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    /// Desired minority / majority count ratio after oversampling.
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 {
            return Err(Error::config("smote k_neighbors must be at least 1"));
        }
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::config(format!(
                "smote target_ratio {} outside (0, 1]",
                self.target_ratio
            )));
        }
        Ok(())
    }
}

/// Which input rows produced a synthetic row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticOrigin {
    pub anchor: usize,
    /// The neighbour used for interpolation.
    pub partner: usize,
    /// All `k` neighbours (they vote on categorical cells).
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SmoteOutput {
    /// Input rows first, unchanged, then the synthetic rows.
    pub table: Table,
    /// One entry per synthetic row, indices into the input table.
    pub origins: Vec<SyntheticOrigin>,
}

/// `(minority is positive, minority rows, majority count)`.
fn minority(table: &Table) -> (bool, Vec<usize>, usize) {
    let labels = table.labels();
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if pos.len() <= neg.len() {
        let majority = neg.len();
        (true, pos, majority)
    } else {
        let majority = pos.len();
        (false, neg, majority)
    }
}

fn nearest_among(space: &DiffSpace, row: usize, candidates: &[usize], k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&j| j != row)
        .map(|&j| (space.distance(row, j), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|(_, j)| j).collect()
}

/// The `k` minority rows closest to `row` (self excluded, ties by row index).
pub fn minority_neighbors(table: &Table, row: usize, k: usize) -> Result<Vec<usize>> {
    if row >= table.n_rows() {
        return Err(Error::config(format!("row {row} out of range")));
    }
    let (_, members, _) = minority(table);
    if !members.contains(&row) {
        return Err(Error::data(format!(
            "row {row} is not in the minority class"
        )));
    }
    if k == 0 || k >= members.len() {
        return Err(Error::data(format!(
            "k = {k} must be in [1, {}) for a minority class of {} rows",
            members.len(),
            members.len()
        )));
    }
    let space = DiffSpace::from_table(table)?;
    Ok(nearest_among(&space, row, &members, k))
}

pub fn smote(table: &Table, config: &SmoteConfig) -> Result<Table> {
    smote_with_origins(table, config).map(|o| o.table)
}

/// Appends synthetic minority rows until the minority count reaches
/// `ceil(target_ratio * majority)`.
pub fn smote_with_origins(table: &Table, config: &SmoteConfig) -> Result<SmoteOutput> {
    config.validate()?;
    let (minority_positive, members, majority) = minority(table);
    if members.is_empty() {
        return Err(Error::data("smote needs both classes"));
    }
    let target = (config.target_ratio * majority as f64).ceil() as usize;
    let needed = target.saturating_sub(members.len());
    if needed == 0 {
        return Ok(SmoteOutput {
            table: table.clone(),
            origins: Vec::new(),
        });
    }
    let k = config.k_neighbors;
    if k >= members.len() {
        return Err(Error::data(format!(
            "smote k = {k} needs a minority class larger than {} rows",
            members.len()
        )));
    }

    let space = DiffSpace::from_table(table)?;
    let neighbors: BTreeMap<usize, Vec<usize>> = members
        .iter()
        .map(|&r| (r, nearest_among(&space, r, &members, k)))
        .collect();

    let mut rng = seed::stage_rng(config.seed, "smote", 0);
    let mut anchors = members.clone();
    anchors.shuffle(&mut rng);

    let label = if minority_positive {
        table.positive_label().to_string()
    } else {
        table.negative_label().to_string()
    };
    let label_idx = table.schema().label_index();
    let mut rows = Vec::with_capacity(needed);
    let mut origins = Vec::with_capacity(needed);
    for s in 0..needed {
        let anchor = anchors[s % anchors.len()];
        let nbrs = &neighbors[&anchor];
        let partner = nbrs[rng.random_range(0..nbrs.len())];
        let u: f64 = rng.random();
        let row: Vec<Cell> = table
            .columns()
            .iter()
            .enumerate()
            .map(|(ci, col)| match col {
                _ if ci == label_idx => Cell::Cat(label.clone()),
                Column::Numeric(v) => {
                    let (a, b) = (v[anchor], v[partner]);
                    Cell::Num((a + u * (b - a)).clamp(a.min(b), a.max(b)))
                }
                Column::Categorical(v) => Cell::Cat(vote(v, anchor, nbrs)),
            })
            .collect();
        rows.push(row);
        origins.push(SyntheticOrigin {
            anchor,
            partner,
            neighbors: nbrs.clone(),
        });
    }
    let mut out = table.clone();
    out.append_synthetic(rows)?;
    Ok(SmoteOutput {
        table: out,
        origins,
    })
}

fn vote(values: &[String], anchor: usize, neighbors: &[usize]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &j in neighbors {
        *counts.entry(values[j].as_str()).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    let winners: Vec<&str> = counts
        .iter()
        .filter(|(_, &c)| c == best)
        .map(|(v, _)| *v)
        .collect();
    if winners.len() == 1 {
        winners[0].to_string()
    } else {
        values[anchor].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{ColumnSchema, Schema};

    fn line(points: &[f64], labels: &[&str]) -> Table {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::label("y", "min"),
        ])
        .unwrap();
        Table::new(
            schema,
            vec![
                Column::Numeric(points.to_vec()),
                Column::Categorical(labels.iter().map(|s| s.to_string()).collect()),
            ],
            "maj",
        )
        .unwrap()
    }

    #[test]
    fn nearest_on_a_line() {
        let t = line(
            &[0.0, 1.0, 10.0, 5.0, 5.0, 5.0, 5.0],
            &["min", "min", "min", "maj", "maj", "maj", "maj"],
        );
        assert_eq!(minority_neighbors(&t, 0, 1).unwrap(), vec![1]);
        assert!(minority_neighbors(&t, 0, 3).is_err());
        assert!(minority_neighbors(&t, 3, 1).is_err());
    }

    #[test]
    fn duplicate_points_tie_by_index() {
        let t = line(
            &[2.0, 2.0, 0.0, 2.0, 7.0, 7.0, 7.0, 7.0, 7.0],
            &[
                "min", "min", "min", "min", "maj", "maj", "maj", "maj", "maj",
            ],
        );
        assert_eq!(minority_neighbors(&t, 3, 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn segment_interpolation() {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("a"),
            ColumnSchema::numeric("b"),
            ColumnSchema::label("y", "min"),
        ])
        .unwrap();
        let t = Table::new(
            schema,
            vec![
                Column::Numeric(vec![0.0, 2.0, 9.0, 9.5, 8.0]),
                Column::Numeric(vec![0.0, 2.0, 9.0, 8.0, 9.5]),
                Column::Categorical(
                    ["min", "min", "maj", "maj", "maj"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                ),
            ],
            "maj",
        )
        .unwrap();
        let cfg = SmoteConfig {
            k_neighbors: 1,
            target_ratio: 1.0,
            seed: 11,
        };
        let out = smote(&t, &cfg).unwrap();
        assert_eq!(out.n_rows(), 6);
        let a = out.column("a").unwrap().as_numeric().unwrap()[5];
        let b = out.column("b").unwrap().as_numeric().unwrap()[5];
        assert_eq!(a, b);
        assert!((0.0..=2.0).contains(&a));
    }

    #[test]
    fn categorical_majority_vote() {
        // anchor 0's three minority neighbours carry A, A, B
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::categorical("c"),
            ColumnSchema::label("y", "min"),
        ])
        .unwrap();
        let cat = |v: &[&str]| Column::Categorical(v.iter().map(|s| s.to_string()).collect());
        let t = Table::new(
            schema,
            vec![
                Column::Numeric(vec![0.0, 1.0, 1.0, 1.0, 50.0, 50.0, 50.0, 50.0, 50.0, 50.0]),
                cat(&["B", "A", "A", "B", "B", "B", "B", "B", "B", "B"]),
                cat(&[
                    "min", "min", "min", "min", "maj", "maj", "maj", "maj", "maj", "maj",
                ]),
            ],
            "maj",
        )
        .unwrap();
        let values: Vec<String> = ["B", "A", "A", "B"].iter().map(|s| s.to_string()).collect();
        assert_eq!(vote(&values, 0, &[1, 2, 3]), "A");
        assert_eq!(vote(&values, 0, &[1, 3]), "B");
        let out = smote_with_origins(
            &t,
            &SmoteConfig {
                k_neighbors: 3,
                target_ratio: 1.0,
                seed: 2,
            },
        )
        .unwrap();
        let cats = out.table.column("c").unwrap().as_categorical().unwrap();
        for (i, o) in out.origins.iter().enumerate() {
            if o.anchor == 0 {
                assert_eq!(cats[10 + i], "A");
            }
        }
    }

    #[test]
    fn counts_match_ratio() {
        let mut pts = Vec::new();
        let mut lab = Vec::new();
        for i in 0..350 {
            pts.push(i as f64);
            lab.push(if i < 100 { "min" } else { "maj" });
        }
        let t = line(&pts, &lab);
        let out = smote(&t, &SmoteConfig::default()).unwrap();
        let pos = out.positive_count();
        assert_eq!((pos, out.n_rows() - pos), (250, 250));
        let half = smote(
            &t,
            &SmoteConfig {
                target_ratio: 0.5,
                ..SmoteConfig::default()
            },
        )
        .unwrap();
        assert_eq!(half.positive_count(), 125);
    }

    #[test]
    fn rejects_bad_input() {
        let single = line(&[0.0, 1.0], &["maj", "maj"]);
        assert!(smote(&single, &SmoteConfig::default()).is_err());
        let small = line(
            &[0.0, 1.0, 2.0, 3.0, 4.0],
            &["min", "min", "maj", "maj", "maj"],
        );
        assert!(smote(&small, &SmoteConfig::default()).is_err());
        let bad_ratio = SmoteConfig {
            target_ratio: 1.5,
            ..SmoteConfig::default()
        };
        assert!(bad_ratio.validate().is_err());
    }
}
