//! Contingency-table weighters: information gain, Gini reduction, symmetrical
//! uncertainty, Pearson chi-squared and single-attribute rule accuracy.

use std::collections::BTreeMap;

use super::discretize::BinEdges;
use crate::dataio::{Column, ColumnRole, Table};
use crate::error::{Error, Result};

/// Shannon entropy in bits of a count vector.
pub fn entropy(class_counts: &[usize]) -> Result<f64> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::data("entropy of all-zero counts"));
    }
    let n = total as f64;
    Ok(class_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

fn gini(class_counts: &[usize]) -> f64 {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    1.0 - class_counts
        .iter()
        .map(|&c| (c as f64 / n).powi(2))
        .sum::<f64>()
}

/// Attribute-value × label counts. `counts[v] = [negatives, positives]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contingency {
    counts: Vec<[usize; 2]>,
}

impl Contingency {
    pub fn new(counts: Vec<[usize; 2]>) -> Result<Self> {
        let c = Contingency { counts };
        if c.total() == 0 {
            return Err(Error::data("empty contingency table"));
        }
        Ok(c)
    }

    pub fn from_codes(codes: &[usize], labels: &[bool]) -> Result<Self> {
        let levels = codes.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![[0usize; 2]; levels];
        for (&c, &y) in codes.iter().zip(labels) {
            counts[c][usize::from(y)] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[[usize; 2]] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|r| r[0] + r[1]).sum()
    }

    pub fn label_counts(&self) -> [usize; 2] {
        self.counts
            .iter()
            .fold([0, 0], |acc, r| [acc[0] + r[0], acc[1] + r[1]])
    }

    fn value_counts(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r[0] + r[1]).collect()
    }

    pub fn label_entropy(&self) -> f64 {
        entropy(&self.label_counts()).expect("non-empty table")
    }

    pub fn attribute_entropy(&self) -> f64 {
        entropy(&self.value_counts()).expect("non-empty table")
    }

    fn conditional<F: Fn(&[usize]) -> f64>(&self, impurity: F) -> f64 {
        let n = self.total() as f64;
        self.counts
            .iter()
            .filter(|r| r[0] + r[1] > 0)
            .map(|r| (r[0] + r[1]) as f64 / n * impurity(r))
            .sum()
    }

    pub fn information_gain(&self) -> f64 {
        let h = self.label_entropy();
        let cond = self.conditional(|r| entropy(r).expect("non-empty row"));
        (h - cond).max(0.0)
    }

    pub fn gini_reduction(&self) -> f64 {
        let g = gini(&self.label_counts());
        (g - self.conditional(gini)).max(0.0)
    }

    /// `2 IG / (H(attribute) + H(label))`, zero when the attribute is constant.
    pub fn symmetrical_uncertainty(&self) -> f64 {
        let hx = self.attribute_entropy();
        if hx == 0.0 {
            return 0.0;
        }
        let denom = hx + self.label_entropy();
        (2.0 * self.information_gain() / denom).clamp(0.0, 1.0)
    }

    /// Raw Pearson statistic; cells with zero expectation contribute nothing.
    pub fn chi_squared(&self) -> f64 {
        let n = self.total() as f64;
        let cols = self.label_counts();
        let mut chi = 0.0;
        for row in &self.counts {
            let row_total = (row[0] + row[1]) as f64;
            for (j, &observed) in row.iter().enumerate() {
                let expected = row_total * cols[j] as f64 / n;
                if expected > 0.0 {
                    chi += (observed as f64 - expected).powi(2) / expected;
                }
            }
        }
        chi
    }

    /// Training accuracy of the one-attribute rule: each value predicts its
    /// majority label, ties going to the overall majority (positive on a tie).
    pub fn one_rule_accuracy(&self) -> f64 {
        let [neg, pos] = self.label_counts();
        let global_positive = pos >= neg;
        let correct: usize = self
            .counts
            .iter()
            .map(|r| match r[1].cmp(&r[0]) {
                std::cmp::Ordering::Greater => r[1],
                std::cmp::Ordering::Less => r[0],
                std::cmp::Ordering::Equal if global_positive => r[1],
                std::cmp::Ordering::Equal => r[0],
            })
            .sum();
        correct as f64 / self.total() as f64
    }
}

/// Discrete codes for an attribute: sorted distinct values for categorical
/// columns, bin indices for numeric ones.
pub fn attribute_codes(
    table: &Table,
    attribute: &str,
    bins: Option<&BinEdges>,
) -> Result<Vec<usize>> {
    let idx = table
        .schema()
        .index_of(attribute)
        .ok_or_else(|| Error::config(format!("unknown attribute '{attribute}'")))?;
    if table.schema().columns()[idx].role == ColumnRole::Label {
        return Err(Error::config(format!("'{attribute}' is the label")));
    }
    match &table.columns()[idx] {
        Column::Numeric(v) => {
            let bins = bins.ok_or_else(|| {
                Error::config(format!("numeric attribute '{attribute}' needs bin edges"))
            })?;
            Ok(v.iter().map(|&x| bins.bin_of(x)).collect())
        }
        Column::Categorical(v) => {
            let mut levels: BTreeMap<&str, usize> = v.iter().map(|s| (s.as_str(), 0)).collect();
            for (i, code) in levels.values_mut().enumerate() {
                *code = i;
            }
            Ok(v.iter().map(|s| levels[s.as_str()]).collect())
        }
    }
}

pub fn contingency(table: &Table, attribute: &str, bins: Option<&BinEdges>) -> Result<Contingency> {
    let codes = attribute_codes(table, attribute, bins)?;
    Contingency::from_codes(&codes, &table.labels())
}

pub fn weight_information_gain(
    table: &Table,
    attribute: &str,
    bins: Option<&BinEdges>,
) -> Result<f64> {
    Ok(contingency(table, attribute, bins)?.information_gain())
}

pub fn weight_gini_index(table: &Table, attribute: &str, bins: Option<&BinEdges>) -> Result<f64> {
    Ok(contingency(table, attribute, bins)?.gini_reduction())
}

pub fn weight_uncertainty(table: &Table, attribute: &str, bins: Option<&BinEdges>) -> Result<f64> {
    Ok(contingency(table, attribute, bins)?.symmetrical_uncertainty())
}

pub fn weight_chi_squared(table: &Table, attribute: &str, bins: Option<&BinEdges>) -> Result<f64> {
    Ok(contingency(table, attribute, bins)?.chi_squared())
}

pub fn weight_rule(table: &Table, attribute: &str, bins: Option<&BinEdges>) -> Result<f64> {
    Ok(contingency(table, attribute, bins)?.one_rule_accuracy())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[10, 10]).unwrap(), 1.0);
        assert_eq!(entropy(&[20, 0]).unwrap(), 0.0);
        // -(9/14) log2(9/14) - (5/14) log2(5/14)
        assert!(close(
            entropy(&[9, 5]).unwrap(),
            0.940_285_958_670_631,
            1e-12
        ));
        assert!(entropy(&[0, 0]).is_err());
    }

    #[test]
    fn chi_squared_examples() {
        let perfect = Contingency::new(vec![[10, 0], [0, 10]]).unwrap();
        assert_eq!(perfect.chi_squared(), 20.0);
        let independent = Contingency::new(vec![[5, 5], [5, 5]]).unwrap();
        assert_eq!(independent.chi_squared(), 0.0);
    }

    #[test]
    fn perfect_predictor() {
        let c = Contingency::new(vec![[10, 0], [0, 10]]).unwrap();
        assert_eq!(c.information_gain(), 1.0);
        assert_eq!(c.gini_reduction(), 0.5);
        assert_eq!(c.symmetrical_uncertainty(), 1.0);
        assert_eq!(c.one_rule_accuracy(), 1.0);
    }

    #[test]
    fn constant_attribute_scores_zero() {
        let c = Contingency::new(vec![[7, 13]]).unwrap();
        assert_eq!(c.information_gain(), 0.0);
        assert_eq!(c.gini_reduction(), 0.0);
        assert_eq!(c.symmetrical_uncertainty(), 0.0);
        assert_eq!(c.chi_squared(), 0.0);
        assert_eq!(c.one_rule_accuracy(), 13.0 / 20.0);
    }

    #[test]
    fn one_rule_enumeration() {
        // value A: 7 pos / 3 neg, value B: 4 pos / 6 neg
        let c = Contingency::new(vec![[3, 7], [6, 4]]).unwrap();
        assert_eq!(c.one_rule_accuracy(), 0.65);
    }

    #[test]
    fn one_rule_floor_is_majority_share() {
        // 64.07% majority, attribute carries no signal
        let c = Contingency::new(vec![[3593, 6407]]).unwrap();
        assert_eq!(c.one_rule_accuracy(), 0.6407);
    }
}
