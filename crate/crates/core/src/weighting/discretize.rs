use crate::error::{Error, Result};

/// Interior cut points for one numeric column. A value `x` falls into bin
/// `#{edges <= x}`, so `e` edges define `e + 1` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges {
    pub column: String,
    edges: Vec<f64>,
}

impl BinEdges {
    pub fn new(column: &str, edges: Vec<f64>) -> Result<Self> {
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::config("bin edges must be finite"));
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("bin edges must be strictly increasing"));
        }
        Ok(BinEdges {
            column: column.to_string(),
            edges,
        })
    }

    /// Equal-frequency binning: cuts at the sorted values found at positions
    /// `j * n / n_bins`, dropping duplicates and any cut at the minimum.
    pub fn equal_frequency(column: &str, values: &[f64], n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::config("n_bins must be at least 1"));
        }
        if values.is_empty() {
            return Err(Error::data("cannot bin an empty column"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut edges: Vec<f64> = Vec::with_capacity(n_bins);
        for j in 1..n_bins {
            let cut = sorted[j * n / n_bins];
            if cut > sorted[0] && edges.last().map_or(true, |&last| cut > last) {
                edges.push(cut);
            }
        }
        Self::new(column, edges)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn bin_of(&self, x: f64) -> usize {
        self.edges.partition_point(|&e| e <= x)
    }
}
