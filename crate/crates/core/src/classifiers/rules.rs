//! Sequential covering rule induction.
//!
//! Conditions are one-sided tests `x >= cut` / `x < cut` on equal-frequency
//! cut points of each encoded input. A rule is grown greedily by precision
//! for its target class (coverage never below `min_coverage`); the best rule
//! over both classes is kept if it beats that class's prior on the rows still
//! uncovered, its rows are removed, and the search repeats. Unmatched rows
//! fall to a default rule scoring the positive rate of the rows left
//! uncovered (the full training rate when none are left).

use serde::{Deserialize, Serialize};

use super::encoding::Matrix;
use crate::weighting::BinEdges;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    pub min_coverage: usize,
    pub n_bins: usize,
    pub max_conditions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: usize,
    pub cut: f64,
    /// `true` tests `x >= cut`, `false` tests `x < cut`.
    pub at_least: bool,
}

impl Condition {
    #[inline]
    fn holds(&self, x: &[f64]) -> bool {
        (x[self.feature] >= self.cut) == self.at_least
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    /// Positive-class fraction among the training rows the rule captured.
    pub score: f64,
    pub coverage: usize,
}

impl Rule {
    fn covers(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleList {
    rules: Vec<Rule>,
    default_score: f64,
}

/// Row set over the training rows, one bit per row.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Bits {
        let mut b = Bits::empty(n);
        for i in (0..n).filter(|&i| f(i)) {
            b.0[i / 64] |= 1 << (i % 64);
        }
        b
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn and3_count(&self, b: &Bits, c: &Bits) -> usize {
        self.0
            .iter()
            .zip(&b.0)
            .zip(&c.0)
            .map(|((a, b), c)| (a & b & c).count_ones() as usize)
            .sum()
    }

    fn and_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
    }

    fn and_not_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

struct Grown {
    conditions: Vec<Condition>,
    covered: Bits,
    coverage: usize,
    precision: f64,
}

impl RuleList {
    pub fn fit(x: &Matrix, y: &[f64], params: &RuleParams) -> RuleList {
        let n = x.rows();
        let mut candidates = Vec::new();
        for f in 0..x.cols() {
            let col = x.column(f);
            let edges = BinEdges::equal_frequency("", &col, params.n_bins.max(2))
                .expect("non-empty column");
            for &cut in edges.edges() {
                candidates.push(Condition {
                    feature: f,
                    cut,
                    at_least: true,
                });
                candidates.push(Condition {
                    feature: f,
                    cut,
                    at_least: false,
                });
            }
        }
        let holds: Vec<Bits> = candidates
            .iter()
            .map(|c| Bits::from_fn(n, |i| c.holds(x.row(i))))
            .collect();
        let class_bits = [
            Bits::from_fn(n, |i| y[i] != 1.0),
            Bits::from_fn(n, |i| y[i] == 1.0),
        ];

        let min_cov = params.min_coverage.max(1);
        let mut remaining = Bits::from_fn(n, |_| true);
        let mut rules = Vec::new();
        loop {
            let left = remaining.count();
            if left < min_cov {
                break;
            }
            let positives = remaining.and_count(&class_bits[1]);
            if positives == 0 || positives == left {
                break;
            }
            let pos_prior = positives as f64 / left as f64;
            let mut best: Option<(bool, Grown)> = None;
            for target in [true, false] {
                let prior = if target { pos_prior } else { 1.0 - pos_prior };
                let hits = &class_bits[usize::from(target)];
                let Some(g) = grow(&remaining, left, hits, &candidates, &holds, params, min_cov)
                else {
                    continue;
                };
                if g.precision <= prior + 1e-12 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((_, b)) => {
                        g.precision > b.precision
                            || (g.precision == b.precision && g.coverage > b.coverage)
                    }
                };
                if better {
                    best = Some((target, g));
                }
            }
            let Some((target, g)) = best else { break };
            let score = if target {
                g.precision
            } else {
                1.0 - g.precision
            };
            rules.push(Rule {
                conditions: g.conditions,
                score,
                coverage: g.coverage,
            });
            remaining.and_not_assign(&g.covered);
        }
        let left = remaining.count();
        let default_score = if left == 0 {
            y.iter().sum::<f64>() / n as f64
        } else {
            remaining.and_count(&class_bits[1]) as f64 / left as f64
        };
        RuleList {
            rules,
            default_score,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.rules
            .iter()
            .find(|r| r.covers(x))
            .map_or(self.default_score, |r| r.score)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_score(&self) -> f64 {
        self.default_score
    }
}

fn grow(
    rows: &Bits,
    n_rows: usize,
    hits: &Bits,
    candidates: &[Condition],
    holds: &[Bits],
    params: &RuleParams,
    min_cov: usize,
) -> Option<Grown> {
    let mut covered = rows.clone();
    let mut coverage = n_rows;
    let mut used: Vec<usize> = Vec::new();
    let mut precision = covered.and_count(hits) as f64 / coverage as f64;
    while used.len() < params.max_conditions && precision < 1.0 {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ci, h) in holds.iter().enumerate() {
            if used.contains(&ci) {
                continue;
            }
            let cov = covered.and_count(h);
            if cov < min_cov || cov == coverage {
                continue;
            }
            let p = covered.and3_count(h, hits) as f64 / cov as f64;
            let better = match best {
                None => true,
                Some((bp, bcov, _)) => p > bp || (p == bp && cov > bcov),
            };
            if better {
                best = Some((p, cov, ci));
            }
        }
        match best {
            Some((p, cov, ci)) if p > precision => {
                covered.and_assign(&holds[ci]);
                coverage = cov;
                used.push(ci);
                precision = p;
            }
            _ => break,
        }
    }
    if used.is_empty() {
        None
    } else {
        Some(Grown {
            conditions: used.into_iter().map(|ci| candidates[ci]).collect(),
            covered,
            coverage,
            precision,
        })
    }
}
