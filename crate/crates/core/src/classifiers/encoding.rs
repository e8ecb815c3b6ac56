use serde::{Deserialize, Serialize};

use crate::dataio::{Cell, Column, Table};
use crate::error::{Error, Result};

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix shape mismatch");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeatureEncoding {
    Numeric {
        name: String,
        center: f64,
        scale: f64,
    },
    /// One indicator per level seen in training; unseen levels encode as all zeros.
    Categorical { name: String, levels: Vec<String> },
}

impl FeatureEncoding {
    pub fn name(&self) -> &str {
        match self {
            FeatureEncoding::Numeric { name, .. } | FeatureEncoding::Categorical { name, .. } => {
                name
            }
        }
    }

    pub fn width(&self) -> usize {
        match self {
            FeatureEncoding::Numeric { .. } => 1,
            FeatureEncoding::Categorical { levels, .. } => levels.len(),
        }
    }
}

/// Maps table rows to model inputs: one-hot categoricals, numerics optionally
/// standardized with training mean and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    pub features: Vec<FeatureEncoding>,
}

impl Encoder {
    pub fn fit(table: &Table, standardize: bool) -> Encoder {
        let features = table
            .feature_names()
            .into_iter()
            .map(|name| match table.column(name).expect("feature exists") {
                Column::Numeric(v) => {
                    let (center, scale) = if standardize {
                        let n = v.len() as f64;
                        let mean = v.iter().sum::<f64>() / n;
                        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                        let sd = var.sqrt();
                        (mean, if sd > 0.0 { sd } else { 1.0 })
                    } else {
                        (0.0, 1.0)
                    };
                    FeatureEncoding::Numeric {
                        name: name.to_string(),
                        center,
                        scale,
                    }
                }
                Column::Categorical(v) => {
                    let mut levels: Vec<String> = v.to_vec();
                    levels.sort();
                    levels.dedup();
                    FeatureEncoding::Categorical {
                        name: name.to_string(),
                        levels,
                    }
                }
            })
            .collect();
        Encoder { features }
    }

    pub fn width(&self) -> usize {
        self.features.iter().map(FeatureEncoding::width).sum()
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.features.iter().map(FeatureEncoding::name).collect()
    }

    /// Encodes one row given in `feature_names()` order.
    pub fn encode_row(&self, row: &[Cell]) -> Result<Vec<f64>> {
        if row.len() != self.features.len() {
            return Err(Error::data(format!(
                "row has {} cells, model expects {}",
                row.len(),
                self.features.len()
            )));
        }
        let mut out = Vec::with_capacity(self.width());
        for (f, cell) in self.features.iter().zip(row) {
            match (f, cell) {
                (FeatureEncoding::Numeric { center, scale, .. }, Cell::Num(x)) => {
                    out.push((x - center) / scale)
                }
                (FeatureEncoding::Categorical { levels, .. }, Cell::Cat(s)) => {
                    out.extend(levels.iter().map(|l| if l == s { 1.0 } else { 0.0 }))
                }
                _ => {
                    return Err(Error::data(format!(
                        "cell for '{}' has the wrong kind",
                        f.name()
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn encode_table(&self, table: &Table) -> Result<Matrix> {
        let mut columns = Vec::with_capacity(self.features.len());
        for f in &self.features {
            let col = table
                .column(f.name())
                .ok_or_else(|| Error::data(format!("table lacks feature '{}'", f.name())))?;
            columns.push(col);
        }
        let n = table.n_rows();
        let width = self.width();
        let mut m = Matrix::zeros(n, width);
        let mut offset = 0;
        for (f, col) in self.features.iter().zip(columns) {
            match (f, col) {
                (FeatureEncoding::Numeric { center, scale, .. }, Column::Numeric(v)) => {
                    for (i, x) in v.iter().enumerate() {
                        m.set(i, offset, (x - center) / scale);
                    }
                }
                (FeatureEncoding::Categorical { levels, .. }, Column::Categorical(v)) => {
                    for (i, s) in v.iter().enumerate() {
                        if let Ok(l) = levels.binary_search(s) {
                            m.set(i, offset + l, 1.0);
                        }
                    }
                }
                _ => {
                    return Err(Error::data(format!(
                        "column '{}' has the wrong kind for this model",
                        f.name()
                    )))
                }
            }
            offset += f.width();
        }
        Ok(m)
    }
}
