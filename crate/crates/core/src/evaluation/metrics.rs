use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decision threshold: a row is predicted positive iff its score is at least this.
pub const THRESHOLD: f64 = 0.5;

/// Accuracy, precision, recall and AUC, all as fractions.
///
/// The same shape carries fold means, sample standard deviations and
/// with-minus-without differences; only per-fold values are bounded to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 4] = ["accuracy", "precision", "recall", "auc"];

    pub fn as_array(&self) -> [f64; 4] {
        [self.accuracy, self.precision, self.recall, self.auc]
    }

    pub fn from_array(v: [f64; 4]) -> Metrics {
        Metrics {
            accuracy: v[0],
            precision: v[1],
            recall: v[2],
            auc: v[3],
        }
    }

    /// Field-wise `self - other`.
    pub fn minus(&self, other: &Metrics) -> Metrics {
        let (a, b) = (self.as_array(), other.as_array());
        Metrics::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }

    /// Field-wise arithmetic mean.
    pub fn mean(values: &[Metrics]) -> Metrics {
        let n = values.len().max(1) as f64;
        Metrics::from_array(std::array::from_fn(|i| {
            values.iter().map(|m| m.as_array()[i]).sum::<f64>() / n
        }))
    }

    /// Field-wise sample standard deviation (0 for fewer than two values).
    pub fn sample_std(values: &[Metrics]) -> Metrics {
        if values.len() < 2 {
            return Metrics::default();
        }
        let mean = Metrics::mean(values).as_array();
        let n = values.len() as f64;
        Metrics::from_array(std::array::from_fn(|i| {
            let ss: f64 = values
                .iter()
                .map(|m| (m.as_array()[i] - mean[i]).powi(2))
                .sum();
            (ss / (n - 1.0)).sqrt()
        }))
    }

    /// Metrics of `scores` at the fixed threshold plus AUC.
    pub fn evaluate(scores: &[f64], labels: &[bool]) -> Result<Metrics> {
        let c = confusion(scores, labels, THRESHOLD)?;
        Ok(Metrics {
            accuracy: c.accuracy(),
            precision: c.precision(),
            recall: c.recall(),
            auc: auc(scores, labels)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// 0 when nothing is predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 0 when there are no positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn confusion(scores: &[f64], labels: &[bool], threshold: f64) -> Result<Confusion> {
    if scores.len() != labels.len() {
        return Err(Error::data(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::config(format!(
            "threshold {threshold} outside [0, 1]"
        )));
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&s, &y) in scores.iter().zip(labels) {
        match (s >= threshold, y) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Area under the ROC curve via the rank-sum statistic; tied scores share
/// their mid-rank, so each tied positive/negative pair counts one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::data(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::data("scores contain NaN"));
    }
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::data("auc needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (doubled) positive ranks keeps the arithmetic in integers
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 averaged, doubled: (i + j + 2)
        let mid2 = (i + j + 2) as u128;
        let pos = order[i..=j].iter().filter(|&&r| labels[r]).count() as u128;
        rank_sum2 += pos * mid2;
        i = j + 1;
    }
    let np = n_pos as u128;
    let u2 = rank_sum2 - np * (np + 1);
    Ok(u2 as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}
