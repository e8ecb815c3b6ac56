use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::ingest::IngestionLog;
use super::schema::{ColumnKind, ColumnRole, Schema};
use crate::error::{Error, Result};

/// Column-major storage. Numeric cells are finite reals.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Numeric(_) => ColumnKind::Numeric,
            Column::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[String]> {
        match self {
            Column::Categorical(v) => Some(v),
            Column::Numeric(_) => None,
        }
    }

    pub fn cell(&self, row: usize) -> Cell {
        match self {
            Column::Numeric(v) => Cell::Num(v[row]),
            Column::Categorical(v) => Cell::Cat(v[row].clone()),
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
            Column::Categorical(v) => {
                Column::Categorical(rows.iter().map(|&r| v[r].clone()).collect())
            }
        }
    }

    fn compare_rows(&self, a: usize, b: usize) -> Ordering {
        match self {
            Column::Numeric(v) => v[a].total_cmp(&v[b]),
            Column::Categorical(v) => v[a].cmp(&v[b]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Cat(String),
}

/// A rectangular, fully populated cohort with a binary label column.
#[derive(Debug, Clone)]
pub struct Table {
    schema: Schema,
    columns: Vec<Column>,
    negative_label: String,
    /// Row index in the originally ingested table; `None` for synthetic rows.
    origin: Vec<Option<usize>>,
    log: IngestionLog,
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.columns == other.columns
            && self.negative_label == other.negative_label
    }
}

impl Table {
    /// Builds a table, checking shape, kinds, finiteness and the label values.
    ///
    /// The label may take at most two values: the schema's positive label and
    /// `negative_label`. A single observed class is allowed here (strata can be
    /// pure); ingestion demands both.
    pub fn new(schema: Schema, columns: Vec<Column>, negative_label: &str) -> Result<Self> {
        if columns.len() != schema.len() {
            return Err(Error::data(format!(
                "schema has {} columns but {} were supplied",
                schema.len(),
                columns.len()
            )));
        }
        let n = columns.first().map_or(0, Column::len);
        if n == 0 {
            return Err(Error::data("table must have at least one row"));
        }
        for (col, spec) in columns.iter().zip(schema.columns()) {
            if col.len() != n {
                return Err(Error::data(format!(
                    "column '{}' has {} cells, expected {n}",
                    spec.name,
                    col.len()
                )));
            }
            if col.kind() != spec.kind {
                return Err(Error::data(format!(
                    "column '{}' does not match its declared kind",
                    spec.name
                )));
            }
            if let Column::Numeric(v) = col {
                if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::data(format!(
                        "column '{}' row {bad} is not a finite number",
                        spec.name
                    )));
                }
            }
        }
        let positive = schema.positive_label();
        if negative_label == positive {
            return Err(Error::data("negative label equals the positive label"));
        }
        let labels = columns[schema.label_index()]
            .as_categorical()
            .expect("label is categorical");
        if let Some(bad) = labels
            .iter()
            .find(|l| l.as_str() != positive && l.as_str() != negative_label)
        {
            return Err(Error::data(format!(
                "label non-binary: unexpected value '{bad}'"
            )));
        }
        Ok(Table {
            schema,
            columns,
            negative_label: negative_label.to_string(),
            origin: (0..n).map(Some).collect(),
            log: IngestionLog::default(),
        })
    }

    pub(crate) fn with_log(mut self, log: IngestionLog) -> Self {
        self.log = log;
        self
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.origin.len()
    }

    pub fn ingestion_log(&self) -> &IngestionLog {
        &self.log
    }

    pub fn origin(&self) -> &[Option<usize>] {
        &self.origin
    }

    pub fn positive_label(&self) -> &str {
        self.schema.positive_label()
    }

    pub fn negative_label(&self) -> &str {
        &self.negative_label
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.schema.index_of(name).map(|i| &self.columns[i])
    }

    pub fn label_name(&self) -> &str {
        &self.schema.label().name
    }

    /// `true` for positive rows.
    pub fn labels(&self) -> Vec<bool> {
        let positive = self.positive_label();
        self.columns[self.schema.label_index()]
            .as_categorical()
            .expect("label is categorical")
            .iter()
            .map(|l| l == positive)
            .collect()
    }

    pub fn positive_count(&self) -> usize {
        self.labels().iter().filter(|&&y| y).count()
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.schema.feature_names()
    }

    pub fn group_name(&self) -> Option<&str> {
        self.schema
            .group_index()
            .map(|i| self.schema.columns()[i].name.as_str())
    }

    pub fn row(&self, row: usize) -> Vec<Cell> {
        self.columns.iter().map(|c| c.cell(row)).collect()
    }

    /// New table holding `rows` in the given order (duplicates allowed).
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            negative_label: self.negative_label.clone(),
            origin: rows.iter().map(|&r| self.origin[r]).collect(),
            log: self.log.clone(),
        }
    }

    /// Keep the label and the listed feature columns, in schema order.
    pub fn with_features(&self, features: &BTreeSet<String>) -> Result<Table> {
        for f in features {
            match self.schema.index_of(f) {
                Some(i) if self.schema.columns()[i].is_feature() => {}
                _ => return Err(Error::config(format!("'{f}' is not a feature column"))),
            }
        }
        let keep: Vec<usize> = self
            .schema
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::Label || features.contains(&c.name))
            .map(|(i, _)| i)
            .collect();
        Ok(Table {
            schema: self.schema.project(&keep),
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            negative_label: self.negative_label.clone(),
            origin: self.origin.clone(),
            log: self.log.clone(),
        })
    }

    /// Append rows produced elsewhere (synthetic rows carry no origin).
    pub(crate) fn append_synthetic(&mut self, rows: Vec<Vec<Cell>>) -> Result<()> {
        for row in rows {
            if row.len() != self.columns.len() {
                return Err(Error::data("synthetic row has the wrong width"));
            }
            for (col, cell) in self.columns.iter_mut().zip(row) {
                match (col, cell) {
                    (Column::Numeric(v), Cell::Num(x)) => v.push(x),
                    (Column::Categorical(v), Cell::Cat(s)) => v.push(s),
                    _ => return Err(Error::data("synthetic cell kind mismatch")),
                }
            }
            self.origin.push(None);
        }
        Ok(())
    }

    /// Row indices sorted by cell content (schema order, then label).
    ///
    /// Stochastic learners sample from this order, which makes them invariant
    /// to the row order of their input.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n_rows()).collect();
        idx.sort_by(|&a, &b| {
            self.columns
                .iter()
                .map(|c| c.compare_rows(a, b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
        idx
    }

    /// Distinct values of the group column, sorted.
    pub fn group_values(&self) -> Result<Vec<String>> {
        let gi = self
            .schema
            .group_index()
            .ok_or_else(|| Error::config("table has no group column"))?;
        let values: BTreeSet<&String> = self.columns[gi]
            .as_categorical()
            .expect("group is categorical")
            .iter()
            .collect();
        Ok(values.into_iter().cloned().collect())
    }
}

/// Rows whose group cell equals `group_value`. The group column is kept.
pub fn filter_by_group(table: &Table, group_value: &str) -> Result<Table> {
    let gi = table
        .schema
        .group_index()
        .ok_or_else(|| Error::config("table has no group column"))?;
    let cells = table.columns[gi]
        .as_categorical()
        .expect("group is categorical");
    let rows: Vec<usize> = cells
        .iter()
        .enumerate()
        .filter(|(_, v)| v.as_str() == group_value)
        .map(|(i, _)| i)
        .collect();
    if rows.is_empty() {
        return Err(Error::data(format!(
            "group value '{group_value}' does not occur"
        )));
    }
    Ok(table.select_rows(&rows))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataio::ColumnSchema;

    pub(crate) fn grouped(groups: &[(&str, usize)]) -> Table {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::group("g"),
            ColumnSchema::label("y", "pos"),
        ])
        .unwrap();
        let mut x = Vec::new();
        let mut g = Vec::new();
        let mut y = Vec::new();
        for (name, count) in groups {
            for i in 0..*count {
                x.push(i as f64);
                g.push(name.to_string());
                y.push(if i % 2 == 0 { "pos" } else { "neg" }.to_string());
            }
        }
        Table::new(
            schema,
            vec![
                Column::Numeric(x),
                Column::Categorical(g),
                Column::Categorical(y),
            ],
            "neg",
        )
        .unwrap()
    }

    #[test]
    fn filter_counts_rows() {
        let t = grouped(&[("A", 5), ("B", 3)]);
        assert_eq!(filter_by_group(&t, "B").unwrap().n_rows(), 3);
        assert_eq!(filter_by_group(&t, "A").unwrap().n_rows(), 5);
        assert!(filter_by_group(&t, "Z").is_err());
    }

    #[test]
    fn filter_with_every_row_matching_is_identity() {
        let t = grouped(&[("A", 6)]);
        assert_eq!(filter_by_group(&t, "A").unwrap(), t);
    }

    #[test]
    fn filter_needs_group_column() {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::label("y", "pos"),
        ])
        .unwrap();
        let t = Table::new(
            schema,
            vec![
                Column::Numeric(vec![1.0, 2.0]),
                Column::Categorical(vec!["pos".into(), "neg".into()]),
            ],
            "neg",
        )
        .unwrap();
        assert!(matches!(filter_by_group(&t, "A"), Err(Error::Config(_))));
    }

    #[test]
    fn filter_partitions_rows() {
        let t = grouped(&[("A", 5), ("B", 3), ("C", 9)]);
        let total: usize = t
            .group_values()
            .unwrap()
            .iter()
            .map(|g| filter_by_group(&t, g).unwrap().n_rows())
            .sum();
        assert_eq!(total, t.n_rows());
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::label("y", "pos"),
        ])
        .unwrap();
        let nan = Table::new(
            schema.clone(),
            vec![
                Column::Numeric(vec![f64::NAN]),
                Column::Categorical(vec!["pos".into()]),
            ],
            "neg",
        );
        assert!(nan.is_err());
        let ragged = Table::new(
            schema,
            vec![
                Column::Numeric(vec![1.0, 2.0]),
                Column::Categorical(vec!["pos".into()]),
            ],
            "neg",
        );
        assert!(ragged.is_err());
    }

    #[test]
    fn canonical_order_ignores_input_order() {
        let t = grouped(&[("A", 4), ("B", 3)]);
        let reversed: Vec<usize> = (0..t.n_rows()).rev().collect();
        let r = t.select_rows(&reversed);
        let a = t.select_rows(&t.canonical_order());
        let b = r.select_rows(&r.canonical_order());
        assert_eq!(a, b);
    }
}
