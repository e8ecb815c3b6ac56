//! Python bindings: cohort loading and generation, attribute weighting,
//! SMOTE, AUC and the with/without ablation.

use std::collections::{BTreeMap, BTreeSet};

use cohortweigh::classifiers::ClassifierSpec;
use cohortweigh::dataio::{self, stratified_folds, Schema, Table};
use cohortweigh::evaluation::{self, Metrics};
use cohortweigh::smote::SmoteConfig;
use cohortweigh::synth::{self, SynthSpec};
use cohortweigh::weighting::{self, Algorithm, WeighConfig};
use cohortweigh::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Compute(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A typed cohort table.
#[pyclass(name = "Table", frozen)]
struct PyTable {
    inner: Table,
}

#[pymethods]
impl PyTable {
    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner
            .feature_names()
            .into_iter()
            .map(String::from)
            .collect()
    }

    #[getter]
    fn group_name(&self) -> Option<String> {
        self.inner.group_name().map(String::from)
    }

    fn labels(&self) -> Vec<bool> {
        self.inner.labels()
    }

    fn positive_count(&self) -> usize {
        self.inner.positive_count()
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        dataio::write_csv(&self.inner, &mut buf).map_err(to_py)?;
        Ok(String::from_utf8(buf).expect("utf-8 csv"))
    }

    fn __repr__(&self) -> String {
        format!(
            "Table(n_rows={}, features={:?})",
            self.inner.n_rows(),
            self.inner.feature_names()
        )
    }
}

/// Loads a CSV file typed by a JSON schema file.
#[pyfunction]
fn load_csv(data: &str, schema: &str) -> PyResult<PyTable> {
    let schema = Schema::from_json_file(schema).map_err(to_py)?;
    let inner = dataio::load_csv(data, &schema).map_err(to_py)?;
    Ok(PyTable { inner })
}

/// Generates a synthetic cohort. `kind` is one of "default", "ablation",
/// "separable", "null" or "linear_xor"; `effect` applies to "ablation".
/// Returns the table and the ground-truth JSON.
#[pyfunction]
#[pyo3(signature = (kind="default", n_rows=1000, seed=0, effect=1.5))]
fn generate_cohort(
    kind: &str,
    n_rows: usize,
    seed: u64,
    effect: f64,
) -> PyResult<(PyTable, String)> {
    let spec = match kind {
        "default" => SynthSpec::default_cohort(n_rows, seed),
        "ablation" => SynthSpec::planted_ablation(effect, n_rows, seed).map_err(to_py)?,
        "separable" => SynthSpec::separable(n_rows, seed),
        "null" => SynthSpec::null(n_rows, seed),
        "linear_xor" => SynthSpec::linear_and_xor(n_rows, seed),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown cohort kind '{other}'"
            )))
        }
    };
    let cohort = synth::generate(&spec).map_err(to_py)?;
    Ok((
        PyTable {
            inner: cohort.table,
        },
        cohort.truth.to_json(),
    ))
}

/// Weights and ranks of every attribute: `{attribute: {"<algorithm>_weight":
/// ..., "<algorithm>_rank": ..., "mean_rank": ..., "overall_rank": ...}}`.
#[pyfunction]
#[pyo3(signature = (table, bins=10, relief_k=10))]
fn weigh(
    py: Python<'_>,
    table: &PyTable,
    bins: usize,
    relief_k: usize,
) -> PyResult<BTreeMap<String, BTreeMap<String, f64>>> {
    let cfg = WeighConfig {
        n_bins: bins,
        relief_k,
        ..WeighConfig::default()
    };
    let m = py
        .detach(|| weighting::weigh_all(&table.inner, &cfg))
        .map_err(to_py)?;
    Ok(m.attributes
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut row = BTreeMap::new();
            for (a, alg) in Algorithm::ALL.iter().enumerate() {
                row.insert(format!("{}_weight", alg.id()), m.weights[i][a]);
                row.insert(format!("{}_rank", alg.id()), m.ranks[i][a] as f64);
            }
            row.insert("mean_rank".into(), m.mean_rank[i]);
            row.insert("overall_rank".into(), m.overall_rank[i] as f64);
            (name.clone(), row)
        })
        .collect())
}

/// Mean and overall rank from per-algorithm ranks.
#[pyfunction]
fn aggregate_ranks(
    ranks: BTreeMap<String, Vec<usize>>,
) -> PyResult<(BTreeMap<String, f64>, BTreeMap<String, usize>)> {
    let s = weighting::aggregate_ranks(&ranks).map_err(to_py)?;
    Ok((s.mean_rank, s.overall_rank))
}

/// Area under the ROC curve.
#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    evaluation::auc(&scores, &labels).map_err(to_py)
}

/// Oversamples the minority class up to `ratio` times the majority count.
#[pyfunction]
#[pyo3(signature = (table, k=5, ratio=1.0, seed=0))]
fn smote(table: &PyTable, k: usize, ratio: f64, seed: u64) -> PyResult<PyTable> {
    let cfg = SmoteConfig {
        k_neighbors: k,
        target_ratio: ratio,
        seed,
    };
    let inner = cohortweigh::smote::smote(&table.inner, &cfg).map_err(to_py)?;
    Ok(PyTable { inner })
}

fn metric_map(m: &Metrics) -> BTreeMap<String, f64> {
    Metrics::NAMES
        .iter()
        .zip(m.as_array())
        .map(|(n, v)| (n.to_string(), v))
        .collect()
}

type MetricTable = BTreeMap<String, BTreeMap<String, f64>>;

/// Cross-validated ablation of `feature`. Returns `(without, with, delta)`:
/// per-classifier mean metrics (plus an "average" entry) for both arms and
/// the difference of the averages.
#[pyfunction]
#[pyo3(signature = (table, feature, folds=10, seed=0, classifiers=None, use_smote=true))]
fn ablation(
    py: Python<'_>,
    table: &PyTable,
    feature: &str,
    folds: usize,
    seed: u64,
    classifiers: Option<Vec<String>>,
    use_smote: bool,
) -> PyResult<(MetricTable, MetricTable, BTreeMap<String, f64>)> {
    let specs: Vec<ClassifierSpec> = match classifiers {
        None => ClassifierSpec::all_defaults(seed),
        Some(ids) => {
            let kinds: BTreeSet<_> = ids
                .iter()
                .map(|id| id.parse())
                .collect::<Result<_, Error>>()
                .map_err(to_py)?;
            kinds
                .into_iter()
                .map(|k| ClassifierSpec::new(k, seed))
                .collect()
        }
    };
    let smote_cfg = use_smote.then_some(SmoteConfig {
        seed,
        ..SmoteConfig::default()
    });
    let report = py
        .detach(|| {
            let plan = stratified_folds(&table.inner, folds, seed)?;
            evaluation::ablation(&table.inner, feature, &specs, &plan, smote_cfg.as_ref())
        })
        .map_err(to_py)?;
    let arm = |r: &evaluation::EvalReport| -> MetricTable {
        let mut t: MetricTable = r
            .results
            .iter()
            .map(|c| (c.kind().id().to_string(), metric_map(&c.mean)))
            .collect();
        t.insert("average".into(), metric_map(&r.average().0));
        t
    };
    Ok((
        arm(&report.without),
        arm(&report.with),
        metric_map(&report.delta()),
    ))
}

#[pymodule]
#[pyo3(name = "cohortweigh")]
fn cohortweigh_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(generate_cohort, m)?)?;
    m.add_function(wrap_pyfunction!(weigh, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(smote, m)?)?;
    m.add_function(wrap_pyfunction!(ablation, m)?)?;
    Ok(())
}
