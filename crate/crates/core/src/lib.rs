//! Feature weighting and feature ablation for tabular binary-outcome cohorts.
//!
//! The crate is organised as a small pipeline:
//!
//! * [`dataio`] loads typed CSV cohorts, builds stratified fold plans and
//!   filters strata.
//! * [`weighting`] scores every attribute with six filter weighters and
//!   aggregates their ranks.
//! * [`smote`] rebalances a training split with synthetic minority rows.
//! * [`classifiers`] holds six binary classifiers written from scratch.
//! * [`evaluation`] runs cross-validation, the with/without ablation and the
//!   per-group analyses.
//! * [`synth`] generates cohorts with planted ground truth.
//! * [`report`] and [`cli`] turn results into CSV / Markdown files.

pub mod classifiers;
pub mod cli;
pub mod dataio;
pub mod error;
pub mod evaluation;
pub mod report;
pub mod seed;
pub mod smote;
pub mod synth;
pub mod weighting;

pub use error::{Error, Result};
