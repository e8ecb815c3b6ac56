use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Label,
    /// Stratification column; also usable as a feature.
    Group,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_label: Option<String>,
}

impl ColumnSchema {
    pub fn numeric(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            role: ColumnRole::Feature,
            positive_label: None,
        }
    }

    pub fn categorical(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            role: ColumnRole::Feature,
            positive_label: None,
        }
    }

    pub fn group(name: &str) -> Self {
        ColumnSchema {
            role: ColumnRole::Group,
            ..Self::categorical(name)
        }
    }

    pub fn label(name: &str, positive: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            role: ColumnRole::Label,
            positive_label: Some(positive.to_string()),
        }
    }

    /// Feature and group columns can both be fed to weighters and models.
    pub fn is_feature(&self) -> bool {
        matches!(self.role, ColumnRole::Feature | ColumnRole::Group)
    }
}

/// Ordered column list. Validated on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaFile", into = "SchemaFile")]
pub struct Schema {
    columns: Vec<ColumnSchema>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    columns: Vec<ColumnSchema>,
}

impl TryFrom<SchemaFile> for Schema {
    type Error = Error;

    fn try_from(f: SchemaFile) -> Result<Self> {
        Schema::new(f.columns)
    }
}

impl From<Schema> for SchemaFile {
    fn from(s: Schema) -> Self {
        SchemaFile { columns: s.columns }
    }
}

impl Schema {
    pub fn new(columns: Vec<ColumnSchema>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut labels = 0;
        let mut groups = 0;
        for c in &columns {
            if c.name.trim().is_empty() {
                return Err(Error::config("column names must be non-empty"));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::config(format!("duplicate column name '{}'", c.name)));
            }
            match c.role {
                ColumnRole::Label => {
                    labels += 1;
                    if c.kind != ColumnKind::Categorical {
                        return Err(Error::config(format!(
                            "label column '{}' must be categorical",
                            c.name
                        )));
                    }
                    if c.positive_label.as_deref().map_or(true, str::is_empty) {
                        return Err(Error::config(format!(
                            "label column '{}' needs a positive_label",
                            c.name
                        )));
                    }
                }
                ColumnRole::Group => {
                    groups += 1;
                    if c.kind != ColumnKind::Categorical {
                        return Err(Error::config(format!(
                            "group column '{}' must be categorical",
                            c.name
                        )));
                    }
                }
                ColumnRole::Feature => {}
            }
            if c.role != ColumnRole::Label && c.positive_label.is_some() {
                return Err(Error::config(format!(
                    "positive_label is only allowed on the label column, found on '{}'",
                    c.name
                )));
            }
        }
        if labels != 1 {
            return Err(Error::config(format!(
                "schema needs exactly one label column, found {labels}"
            )));
        }
        if groups > 1 {
            return Err(Error::config(format!(
                "schema allows at most one group column, found {groups}"
            )));
        }
        Ok(Schema { columns })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn columns(&self) -> &[ColumnSchema] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn label_index(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.role == ColumnRole::Label)
            .expect("validated schema has a label")
    }

    pub fn label(&self) -> &ColumnSchema {
        &self.columns[self.label_index()]
    }

    pub fn positive_label(&self) -> &str {
        self.label().positive_label.as_deref().unwrap_or_default()
    }

    pub fn group_index(&self) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.role == ColumnRole::Group)
    }

    /// Names of feature and group columns in schema order.
    pub fn feature_names(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.is_feature())
            .map(|c| c.name.as_str())
            .collect()
    }

    /// Keep only the label plus the named feature columns (schema order).
    pub(crate) fn project(&self, keep: &[usize]) -> Schema {
        Schema {
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }
}
