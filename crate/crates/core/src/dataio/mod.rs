//! Typed tabular cohorts: schema, table, CSV ingestion, fold plans and strata.

mod folds;
mod ingest;
mod schema;
mod table;

pub use folds::{split, stratified_folds, FoldPlan};
pub use ingest::{load_csv, read_csv, write_csv, IngestionLog};
pub use schema::{ColumnKind, ColumnRole, ColumnSchema, Schema};
pub use table::{filter_by_group, Cell, Column, Table};
