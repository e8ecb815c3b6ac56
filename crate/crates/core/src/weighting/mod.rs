//! Six filter weighters, per-algorithm ranking and rank aggregation.

mod discretize;
mod measures;
mod rank;
mod relief;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use discretize::BinEdges;
pub use measures::{
    attribute_codes, contingency, entropy, weight_chi_squared, weight_gini_index,
    weight_information_gain, weight_rule, weight_uncertainty, Contingency,
};
pub use rank::{aggregate_ranks, rank_attributes, RankSummary};
pub(crate) use relief::DiffSpace;
pub use relief::{weight_relief, weight_relief_sampled};

use crate::dataio::{Column, Table};
use crate::error::{Error, Result};

/// Weighting algorithms, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    InformationGain,
    GiniIndex,
    Rule,
    Uncertainty,
    Relief,
    ChiSquared,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::InformationGain,
        Algorithm::GiniIndex,
        Algorithm::Rule,
        Algorithm::Uncertainty,
        Algorithm::Relief,
        Algorithm::ChiSquared,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::InformationGain => "information_gain",
            Algorithm::GiniIndex => "gini_index",
            Algorithm::Rule => "rule",
            Algorithm::Uncertainty => "uncertainty",
            Algorithm::Relief => "relief",
            Algorithm::ChiSquared => "chi_squared",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Algorithm::InformationGain => "Information Gain",
            Algorithm::GiniIndex => "Gini Index",
            Algorithm::Rule => "Rule",
            Algorithm::Uncertainty => "Uncertainty",
            Algorithm::Relief => "Relief",
            Algorithm::ChiSquared => "Chi-Squared",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.id() == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeighConfig {
    /// Equal-frequency bins for numeric attributes.
    pub n_bins: usize,
    pub relief_k: usize,
    /// Relief anchors; `None` uses every row.
    pub relief_anchors: Option<usize>,
    pub seed: u64,
}

impl Default for WeighConfig {
    fn default() -> Self {
        WeighConfig {
            n_bins: 10,
            relief_k: 10,
            relief_anchors: None,
            seed: 0,
        }
    }
}

/// Attribute × algorithm weights and ranks plus the aggregated ranking.
/// Rows are in the table's feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub attributes: Vec<String>,
    pub weights: Vec<[f64; 6]>,
    pub ranks: Vec<[usize; 6]>,
    pub mean_rank: Vec<f64>,
    pub overall_rank: Vec<usize>,
}

impl WeightMatrix {
    /// Ranks every algorithm column and aggregates.
    pub fn from_weights(attributes: Vec<String>, weights: Vec<[f64; 6]>) -> Result<Self> {
        if attributes.len() != weights.len() {
            return Err(Error::data("attribute and weight rows differ in length"));
        }
        let mut ranks = vec![[0usize; 6]; attributes.len()];
        for a in 0..6 {
            let column: BTreeMap<String, f64> = attributes
                .iter()
                .zip(&weights)
                .map(|(n, w)| (n.clone(), w[a]))
                .collect();
            if column.len() != attributes.len() {
                return Err(Error::data("duplicate attribute names"));
            }
            let r = rank_attributes(&column)?;
            for (i, name) in attributes.iter().enumerate() {
                ranks[i][a] = r[name];
            }
        }
        let rank_rows: BTreeMap<String, Vec<usize>> = attributes
            .iter()
            .zip(&ranks)
            .map(|(n, r)| (n.clone(), r.to_vec()))
            .collect();
        let summary = aggregate_ranks(&rank_rows)?;
        Ok(WeightMatrix {
            mean_rank: attributes.iter().map(|n| summary.mean_rank[n]).collect(),
            overall_rank: attributes.iter().map(|n| summary.overall_rank[n]).collect(),
            attributes,
            weights,
            ranks,
        })
    }

    pub fn index_of(&self, attribute: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == attribute)
    }

    pub fn weight(&self, attribute: &str, algorithm: Algorithm) -> Option<f64> {
        let col = Algorithm::ALL.iter().position(|&a| a == algorithm)?;
        self.index_of(attribute).map(|i| self.weights[i][col])
    }

    pub fn overall_rank_of(&self, attribute: &str) -> Option<usize> {
        self.index_of(attribute).map(|i| self.overall_rank[i])
    }

    /// Row indices sorted by overall rank.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.attributes.len()).collect();
        idx.sort_by_key(|&i| self.overall_rank[i]);
        idx
    }

    pub fn top(&self, n: usize) -> Vec<String> {
        self.order()
            .into_iter()
            .take(n)
            .map(|i| self.attributes[i].clone())
            .collect()
    }
}

/// Runs the six weighters over every feature column of `table`.
pub fn weigh_all(table: &Table, config: &WeighConfig) -> Result<WeightMatrix> {
    let attributes: Vec<String> = table
        .feature_names()
        .into_iter()
        .map(String::from)
        .collect();
    if attributes.is_empty() {
        return Err(Error::data("table has no feature columns"));
    }
    let relief = match config.relief_anchors {
        None => weight_relief(table, config.relief_k)?,
        Some(m) => weight_relief_sampled(table, config.relief_k, m, config.seed)?,
    };
    let labels = table.labels();
    let rows: Vec<[f64; 6]> = attributes
        .par_iter()
        .map(|name| -> Result<[f64; 6]> {
            let bins = match table.column(name).expect("feature exists") {
                Column::Numeric(v) => Some(BinEdges::equal_frequency(name, v, config.n_bins)?),
                Column::Categorical(_) => None,
            };
            let codes = attribute_codes(table, name, bins.as_ref())?;
            let c = Contingency::from_codes(&codes, &labels)?;
            Ok([
                c.information_gain(),
                c.gini_reduction(),
                c.one_rule_accuracy(),
                c.symmetrical_uncertainty(),
                relief[name],
                c.chi_squared(),
            ])
        })
        .collect::<Result<_>>()?;
    WeightMatrix::from_weights(attributes, rows)
}
