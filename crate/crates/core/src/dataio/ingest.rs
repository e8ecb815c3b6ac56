use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use super::schema::{ColumnKind, ColumnRole, Schema};
use super::table::{Column, Table};
use crate::error::{Error, Result};

/// Per-column count of cells filled in during ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestionLog {
    pub imputed: BTreeMap<String, usize>,
}

impl IngestionLog {
    pub fn total(&self) -> usize {
        self.imputed.values().sum()
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "?")
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Table> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Reads an RFC 4180 CSV with a header row. Header names must equal the
/// schema's names as a set; column order in the file is free.
///
/// Missing numeric cells take the column median of observed values, missing
/// categorical cells the column mode (ties to the smallest value). The label
/// column cannot be imputed.
pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::data("empty file"));
    }
    let mut position = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        if schema.index_of(h).is_none() {
            return Err(Error::data(format!("unknown column '{h}' in header")));
        }
        if position.insert(h.as_str(), i).is_some() {
            return Err(Error::data(format!("column '{h}' appears twice in header")));
        }
    }
    if let Some(missing) = schema
        .columns()
        .iter()
        .find(|c| !position.contains_key(c.name.as_str()))
    {
        return Err(Error::data(format!(
            "column '{}' missing from header",
            missing.name
        )));
    }

    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); schema.len()];
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::data(format!(
                "row {} has {} cells, expected {}",
                line + 1,
                record.len(),
                header.len()
            )));
        }
        for (ci, col) in schema.columns().iter().enumerate() {
            let cell = &record[position[col.name.as_str()]];
            raw[ci].push(if is_missing(cell) {
                None
            } else {
                Some(cell.to_string())
            });
        }
    }
    if raw[0].is_empty() {
        return Err(Error::data("empty file"));
    }

    let mut log = IngestionLog::default();
    let mut columns = Vec::with_capacity(schema.len());
    for (col, cells) in schema.columns().iter().zip(raw) {
        let missing = cells.iter().filter(|c| c.is_none()).count();
        if missing == cells.len() {
            return Err(Error::data(format!("column '{}' has no values", col.name)));
        }
        if missing > 0 && col.role == ColumnRole::Label {
            return Err(Error::data(format!(
                "label column '{}' has {missing} missing cells",
                col.name
            )));
        }
        if missing > 0 {
            log.imputed.insert(col.name.clone(), missing);
        }
        columns.push(match col.kind {
            ColumnKind::Numeric => {
                let mut values = Vec::with_capacity(cells.len());
                for (row, c) in cells.iter().enumerate() {
                    values.push(match c {
                        Some(s) => {
                            let x: f64 = s.parse().map_err(|_| {
                                Error::data(format!(
                                    "unparseable numeric cell '{s}' in column '{}' row {}",
                                    col.name,
                                    row + 1
                                ))
                            })?;
                            if !x.is_finite() {
                                return Err(Error::data(format!(
                                    "non-finite numeric cell in column '{}' row {}",
                                    col.name,
                                    row + 1
                                )));
                            }
                            Some(x)
                        }
                        None => None,
                    });
                }
                let fill = median(values.iter().flatten().copied().collect());
                Column::Numeric(values.into_iter().map(|v| v.unwrap_or(fill)).collect())
            }
            ColumnKind::Categorical => {
                let fill = mode(cells.iter().flatten());
                Column::Categorical(
                    cells
                        .into_iter()
                        .map(|c| c.unwrap_or_else(|| fill.clone()))
                        .collect(),
                )
            }
        });
    }

    let label_values: BTreeSet<&String> = columns[schema.label_index()]
        .as_categorical()
        .expect("label is categorical")
        .iter()
        .collect();
    let positive = schema.positive_label();
    if label_values.len() != 2 {
        return Err(Error::data(format!(
            "label non-binary: found {} distinct values",
            label_values.len()
        )));
    }
    if !label_values.iter().any(|v| v.as_str() == positive) {
        return Err(Error::data(format!(
            "positive label '{positive}' does not occur in the label column"
        )));
    }
    let negative = label_values
        .into_iter()
        .find(|v| v.as_str() != positive)
        .cloned()
        .expect("two label values");
    Ok(Table::new(schema.clone(), columns, &negative)?.with_log(log))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn mode<'a>(values: impl Iterator<Item = &'a String>) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    // max_by_key keeps the last maximum; iterate in reverse so ties go to the smallest value
    counts
        .into_iter()
        .rev()
        .max_by_key(|(_, c)| *c)
        .map(|(v, _)| v.to_string())
        .unwrap_or_default()
}

/// Writes `table` as CSV in schema column order. Numbers use the shortest
/// representation that reads back to the same value.
pub fn write_csv<W: std::io::Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(table.schema().columns().iter().map(|c| c.name.as_str()))?;
    for r in 0..table.n_rows() {
        let row: Vec<String> = table
            .columns()
            .iter()
            .map(|c| match c {
                Column::Numeric(v) => v[r].to_string(),
                Column::Categorical(v) => v[r].clone(),
            })
            .collect();
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{Cell, ColumnSchema};

    fn schema() -> Schema {
        Schema::new(vec![
            ColumnSchema::numeric("age"),
            ColumnSchema::categorical("smoking"),
            ColumnSchema::label("cad", "yes"),
        ])
        .unwrap()
    }

    #[test]
    fn complete_file_needs_no_imputation() {
        let csv = "age,smoking,cad\n40,no,yes\n50,yes,no\n60,no,yes\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.ingestion_log().total(), 0);
        assert_eq!(t.negative_label(), "no");
        assert_eq!(t.labels(), vec![true, false, true]);
    }

    #[test]
    fn column_order_in_file_is_free() {
        let csv = "cad,age,smoking\nyes,40,no\nno,50,yes\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(
            t.row(1),
            vec![
                Cell::Num(50.0),
                Cell::Cat("yes".into()),
                Cell::Cat("no".into())
            ]
        );
    }

    #[test]
    fn blank_numeric_takes_median() {
        let csv = "age,smoking,cad\n40,no,yes\n,no,no\n50,yes,no\n60,no,yes\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(t.column("age").unwrap().as_numeric().unwrap()[1], 50.0);
        assert_eq!(t.ingestion_log().imputed["age"], 1);
    }

    #[test]
    fn blank_categorical_takes_mode() {
        let csv = "age,smoking,cad\n40,no,yes\n41,,no\n50,yes,no\n60,no,yes\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(
            t.column("smoking").unwrap().as_categorical().unwrap()[1],
            "no"
        );
        assert_eq!(t.ingestion_log().total(), 1);
    }

    #[test]
    fn reloading_imputed_output_is_idempotent() {
        let csv = "age,smoking,cad\n40,no,yes\n,no,no\n60,no,yes\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        let mut out = String::from("age,smoking,cad\n");
        for r in 0..t.n_rows() {
            let cells: Vec<String> = t
                .row(r)
                .into_iter()
                .map(|c| match c {
                    Cell::Num(x) => x.to_string(),
                    Cell::Cat(s) => s,
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        let again = read_csv(out.as_bytes(), &schema()).unwrap();
        assert_eq!(again.ingestion_log().total(), 0);
        assert_eq!(again, t);
    }

    #[test]
    fn label_with_three_values_is_rejected() {
        let csv = "age,smoking,cad\n40,no,yes\n50,no,no\n60,no,maybe\n";
        let err = read_csv(csv.as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("label non-binary"), "{err}");
    }

    #[test]
    fn error_paths() {
        let unknown = "age,smoking,cad,extra\n40,no,yes,1\n";
        assert!(read_csv(unknown.as_bytes(), &schema()).is_err());
        let bad_num = "age,smoking,cad\nforty,no,yes\n50,no,no\n";
        assert!(read_csv(bad_num.as_bytes(), &schema()).is_err());
        assert!(read_csv("".as_bytes(), &schema()).is_err());
        assert!(read_csv("age,smoking,cad\n".as_bytes(), &schema()).is_err());
        let missing_label = "age,smoking,cad\n40,no,\n50,no,no\n60,no,yes\n";
        assert!(read_csv(missing_label.as_bytes(), &schema()).is_err());
    }

    #[test]
    fn quoted_fields_follow_rfc4180() {
        let csv = "age,smoking,cad\n40,\"former, light\",yes\n50,no,no\n";
        let t = read_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(
            t.column("smoking").unwrap().as_categorical().unwrap()[0],
            "former, light"
        );
    }
}
