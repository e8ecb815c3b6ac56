//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the library's own formulas.

#![allow(dead_code)]

use std::collections::BTreeMap;

use cohortweigh::dataio::{Column, ColumnSchema, Schema, Table};

/// Published attribute ranks, columns in the order information gain, Gini
/// index, rule, uncertainty, relief, chi-squared.
pub const TABLE1_RANKS: [(&str, [usize; 6]); 9] = [
    ("gender", [1, 1, 2, 1, 1, 1]),
    ("age", [2, 2, 1, 3, 9, 2]),
    ("WC", [4, 3, 9, 2, 2, 3]),
    ("ethnicity", [3, 4, 3, 5, 3, 4]),
    ("smoking", [5, 5, 7, 4, 7, 5]),
    ("DM", [6, 6, 5, 6, 8, 6]),
    ("BMI", [7, 7, 8, 7, 6, 7]),
    ("HBP", [8, 8, 4, 8, 4, 8]),
    ("LDL", [9, 9, 6, 9, 5, 9]),
];

/// Published mean of ranks and overall rank per attribute.
pub const TABLE1_SUMMARY: [(&str, f64, usize); 9] = [
    ("gender", 1.17, 1),
    ("age", 3.17, 2),
    ("WC", 3.83, 4),
    ("ethnicity", 3.67, 3),
    ("smoking", 5.5, 5),
    ("DM", 6.17, 6),
    ("BMI", 7.00, 8),
    ("HBP", 6.67, 7),
    ("LDL", 7.83, 9),
];

/// Published weights for the four algorithms without tied weights:
/// information gain, Gini index, relief, chi-squared.
pub const TABLE1_UNTIED_WEIGHTS: [(&str, [f64; 4]); 9] = [
    ("gender", [0.05733, 0.03632, 1.31518, 259.3119]),
    ("age", [0.02003, 0.01269, 0.00264, 120.5562]),
    ("WC", [0.01753, 0.01128, 0.49711, 80.56527]),
    ("ethnicity", [0.01826, 0.01099, 0.27172, 79.42729]),
    ("smoking", [0.01258, 0.00764, 0.03802, 54.58233]),
    ("DM", [0.01047, 0.0065, 0.00791, 46.46549]),
    ("BMI", [0.00343, 0.00221, 0.07301, 15.79585]),
    ("HBP", [0.00092, 0.00058, 0.13964, 4.197016]),
    ("LDL", [0.00005, 0.00003, 0.10739, 0.251706]),
];

/// Per-classifier `(mean, std)` in report order (rule induction, deep
/// learning, GLM, GBT, decision tree, random forest), metrics in the order
/// accuracy, precision, recall (percent) and AUC.
pub type PublishedTable = [[(f64, f64); 6]; 4];

pub const TABLE2_WITHOUT: PublishedTable = [
    [
        (72.92, 2.25),
        (71.25, 1.05),
        (73.35, 3.26),
        (72.57, 2.37),
        (71.54, 2.25),
        (71.56, 2.38),
    ],
    [
        (75.63, 2.36),
        (72.13, 1.79),
        (75.26, 2.85),
        (73.62, 1.75),
        (73.26, 2.59),
        (74.28, 1.25),
    ],
    [
        (83.55, 2.15),
        (90.02, 3.24),
        (86.84, 2.67),
        (89.82, 3.64),
        (86.85, 2.98),
        (85.24, 2.33),
    ],
    [
        (0.73, 0.03),
        (0.75, 0.02),
        (0.76, 0.03),
        (0.75, 0.02),
        (0.67, 0.03),
        (0.74, 0.02),
    ],
];

pub const TABLE3_WITH: PublishedTable = [
    [
        (77.65, 1.22),
        (75.54, 2.58),
        (79.65, 1.77),
        (75.24, 1.68),
        (74.56, 1.79),
        (74.24, 1.28),
    ],
    [
        (79.26, 3.24),
        (76.85, 1.11),
        (79.42, 1.45),
        (77.26, 2.98),
        (76.25, 2.24),
        (77.23, 2.93),
    ],
    [
        (92.38, 3.28),
        (94.92, 2.78),
        (90.11, 3.55),
        (93.85, 1.95),
        (89.64, 1.19),
        (88.05, 2.25),
    ],
    [
        (0.77, 0.02),
        (0.79, 0.03),
        (0.81, 0.01),
        (0.80, 0.03),
        (0.69, 0.02),
        (0.79, 0.02),
    ],
];

/// Published Average columns `(mean, std)` per metric.
pub const TABLE2_AVERAGE: [(f64, f64); 4] =
    [(72.20, 2.26), (74.03, 2.10), (87.05, 2.84), (0.73, 0.03)];
pub const TABLE3_AVERAGE: [(f64, f64); 4] =
    [(76.15, 1.72), (77.71, 2.32), (91.49, 2.50), (0.77, 0.02)];
/// Published with-minus-without changes.
pub const PUBLISHED_DELTA: [f64; 4] = [3.95, 3.68, 4.44, 0.04];

/// Small deterministic generator so fixtures do not depend on the
/// library's seeding.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut z = self.0;
        z = (z ^ (z >> 33)).wrapping_mul(0xff51afd7ed558ccd);
        z ^ (z >> 33)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.unit() * n as f64) as usize
    }
}

/// A feature column given as strings (categorical) or numbers.
pub enum Col {
    Num(&'static str, Vec<f64>),
    Cat(&'static str, Vec<String>),
}

/// Builds a table whose label column `y` is "pos"/"neg".
pub fn table(cols: Vec<Col>, labels: &[bool]) -> Table {
    let mut schema = Vec::new();
    let mut columns = Vec::new();
    for c in cols {
        match c {
            Col::Num(name, v) => {
                schema.push(ColumnSchema::numeric(name));
                columns.push(Column::Numeric(v));
            }
            Col::Cat(name, v) => {
                schema.push(ColumnSchema::categorical(name));
                columns.push(Column::Categorical(v));
            }
        }
    }
    schema.push(ColumnSchema::label("y", "pos"));
    columns.push(Column::Categorical(
        labels
            .iter()
            .map(|&b| if b { "pos" } else { "neg" }.to_string())
            .collect(),
    ));
    Table::new(Schema::new(schema).unwrap(), columns, "neg").unwrap()
}

pub fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Contingency statistics computed straight from `(value, label)` pairs.
pub struct BruteForce {
    pub information_gain: f64,
    pub gini_reduction: f64,
    pub symmetrical_uncertainty: f64,
    pub chi_squared: f64,
    pub one_rule_accuracy: f64,
}

fn h(probs: impl Iterator<Item = f64>) -> f64 {
    probs.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

pub fn brute_force(values: &[String], labels: &[bool]) -> BruteForce {
    let n = values.len() as f64;
    let n_pos = labels.iter().filter(|&&y| y).count() as f64;
    let n_neg = n - n_pos;
    let mut groups: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (v, &y) in values.iter().zip(labels) {
        let e = groups.entry(v).or_default();
        if y {
            e.1 += 1.0;
        } else {
            e.0 += 1.0;
        }
    }
    let h_y = h([n_pos / n, n_neg / n].into_iter());
    let gini_y = 1.0 - (n_pos / n).powi(2) - (n_neg / n).powi(2);
    let mut h_cond = 0.0;
    let mut gini_cond = 0.0;
    let mut chi = 0.0;
    let mut correct = 0.0;
    let mut h_x_terms = Vec::new();
    for &(neg, pos) in groups.values() {
        let m = neg + pos;
        let w = m / n;
        h_cond += w * h([pos / m, neg / m].into_iter());
        gini_cond += w * (1.0 - (pos / m).powi(2) - (neg / m).powi(2));
        for (obs, col) in [(neg, n_neg), (pos, n_pos)] {
            let expected = m * col / n;
            if expected > 0.0 {
                chi += (obs - expected).powi(2) / expected;
            }
        }
        correct += if pos > neg {
            pos
        } else if neg > pos {
            neg
        } else if n_pos >= n_neg {
            pos
        } else {
            neg
        };
        h_x_terms.push(w);
    }
    let ig = (h_y - h_cond).max(0.0);
    let h_x = h(h_x_terms.into_iter());
    BruteForce {
        information_gain: ig,
        gini_reduction: (gini_y - gini_cond).max(0.0),
        symmetrical_uncertainty: if h_x == 0.0 {
            0.0
        } else {
            2.0 * ig / (h_x + h_y)
        },
        chi_squared: chi,
        one_rule_accuracy: correct / n,
    }
}

/// ReliefF by exhaustive search: every row is an anchor, neighbours are the
/// `k` closest rows of each class under the sum of per-attribute diffs,
/// ties going to the smaller row index.
pub fn relief_reference(
    numeric: &[Vec<f64>],
    categorical: &[Vec<String>],
    labels: &[bool],
    k: usize,
) -> (Vec<f64>, Vec<f64>) {
    let n = labels.len();
    let ranges: Vec<(f64, f64)> = numeric
        .iter()
        .map(|c| {
            let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let diff_num = |f: usize, a: usize, b: usize| {
        let (lo, hi) = ranges[f];
        if hi > lo {
            ((numeric[f][a] - numeric[f][b]) / (hi - lo)).abs()
        } else {
            0.0
        }
    };
    let diff_cat = |f: usize, a: usize, b: usize| {
        if categorical[f][a] == categorical[f][b] {
            0.0
        } else {
            1.0
        }
    };
    let dist = |a: usize, b: usize| {
        (0..numeric.len()).map(|f| diff_num(f, a, b)).sum::<f64>()
            + (0..categorical.len())
                .map(|f| diff_cat(f, a, b))
                .sum::<f64>()
    };
    let mut wn = vec![0.0; numeric.len()];
    let mut wc = vec![0.0; categorical.len()];
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (dist(i, j), j))
            .collect();
        others.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let hits: Vec<usize> = others
            .iter()
            .filter(|(_, j)| labels[*j] == labels[i])
            .take(k)
            .map(|p| p.1)
            .collect();
        let misses: Vec<usize> = others
            .iter()
            .filter(|(_, j)| labels[*j] != labels[i])
            .take(k)
            .map(|p| p.1)
            .collect();
        let scale = 1.0 / (n as f64 * k as f64);
        for f in 0..numeric.len() {
            let m: f64 = misses.iter().map(|&j| diff_num(f, i, j)).sum();
            let h: f64 = hits.iter().map(|&j| diff_num(f, i, j)).sum();
            wn[f] += (m - h) * scale;
        }
        for f in 0..categorical.len() {
            let m: f64 = misses.iter().map(|&j| diff_cat(f, i, j)).sum();
            let h: f64 = hits.iter().map(|&j| diff_cat(f, i, j)).sum();
            wc[f] += (m - h) * scale;
        }
    }
    (wn, wc)
}

/// AUC by counting every positive/negative pair.
pub fn auc_pairs(scores: &[f64], labels: &[bool]) -> f64 {
    let mut concordant = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        if !yi {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                concordant += 1.0;
            } else if scores[i] == scores[j] {
                concordant += 0.5;
            }
        }
    }
    concordant / pairs
}
