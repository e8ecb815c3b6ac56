//! Cross-validated evaluation, feature ablation and per-group analyses.
//!
//! Every (classifier, fold, arm) evaluation is independent and runs on the
//! rayon pool; results are assembled in classifier-then-fold order, so the
//! output does not depend on the number of threads.

mod metrics;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use metrics::{auc, confusion, Confusion, Metrics, THRESHOLD};

use crate::classifiers::{self, ClassifierKind, ClassifierSpec};
use crate::dataio::{filter_by_group, split, stratified_folds, FoldPlan, Table};
use crate::error::{Error, Result};
use crate::seed;
use crate::smote::{smote_with_origins, SmoteConfig};
use crate::weighting::{weigh_all, WeighConfig};

/// Fold metrics of one classifier and their mean and sample std.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub spec: ClassifierSpec,
    pub folds: Vec<Metrics>,
    pub mean: Metrics,
    pub std: Metrics,
}

impl ClassifierResult {
    pub fn from_folds(spec: ClassifierSpec, folds: Vec<Metrics>) -> Self {
        ClassifierResult {
            mean: Metrics::mean(&folds),
            std: Metrics::sample_std(&folds),
            spec,
            folds,
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        self.spec.kind
    }
}

/// Rows seen by one fold, as indices into the table given to
/// [`cross_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldTrace {
    pub fold: usize,
    pub test_rows: Vec<usize>,
    pub train_rows: Vec<usize>,
    /// Every row used as a SMOTE anchor or neighbour.
    pub smote_sources: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub result: ClassifierResult,
    pub traces: Vec<FoldTrace>,
}

fn check_mask(table: &Table, features: &BTreeSet<String>) -> Result<()> {
    if features.is_empty() {
        return Err(Error::config("feature mask is empty"));
    }
    let known: BTreeSet<&str> = table.feature_names().into_iter().collect();
    if let Some(bad) = features.iter().find(|f| !known.contains(f.as_str())) {
        return Err(Error::config(format!("'{bad}' is not a feature column")));
    }
    Ok(())
}

struct PreparedFold {
    train: Table,
    test: Table,
    trace: FoldTrace,
}

fn prepare_fold(
    table: &Table,
    plan: &FoldPlan,
    fold: usize,
    smote: Option<&SmoteConfig>,
) -> Result<PreparedFold> {
    let (train, test) = split(table, plan, fold)?;
    if test.n_rows() < 2 {
        return Err(Error::data(format!(
            "fold {fold} has fewer than 2 test rows"
        )));
    }
    let origin_of = |t: &Table, i: usize| t.origin()[i];
    let test_rows: Vec<usize> = (0..test.n_rows())
        .filter_map(|i| origin_of(&test, i))
        .collect();
    let train_rows: Vec<usize> = (0..train.n_rows())
        .filter_map(|i| origin_of(&train, i))
        .collect();

    let (train, smote_sources) = match smote {
        None => (train, Vec::new()),
        Some(cfg) => {
            let cfg = SmoteConfig {
                seed: seed::derive(cfg.seed, "smote", fold as u64),
                ..*cfg
            };
            let out = smote_with_origins(&train, &cfg)
                .map_err(|e| prefix_data(e, &format!("fold {fold}")))?;
            let mut sources: BTreeSet<usize> = BTreeSet::new();
            for o in &out.origins {
                for &r in [o.anchor, o.partner].iter().chain(&o.neighbors) {
                    if let Some(orig) = origin_of(&train, r) {
                        sources.insert(orig);
                    }
                }
            }
            (out.table, sources.into_iter().collect())
        }
    };

    let test_set: BTreeSet<usize> = test_rows.iter().copied().collect();
    if let Some(r) = train_rows
        .iter()
        .chain(&smote_sources)
        .find(|r| test_set.contains(r))
    {
        return Err(Error::compute(format!(
            "fold {fold}: test row {r} reached the training data"
        )));
    }
    Ok(PreparedFold {
        train,
        test,
        trace: FoldTrace {
            fold,
            test_rows,
            train_rows,
            smote_sources,
        },
    })
}

fn prefix_data(e: Error, context: &str) -> Error {
    match e {
        Error::Data(m) => Error::data(format!("{context}: {m}")),
        other => other,
    }
}

fn score_fold(spec: &ClassifierSpec, prepared: &PreparedFold) -> Result<Metrics> {
    let fold = prepared.trace.fold;
    let fold_spec = ClassifierSpec {
        seed: seed::derive(spec.seed, "fit", fold as u64),
        ..spec.clone()
    };
    let model = classifiers::fit(&fold_spec, &prepared.train)?;
    let scores = classifiers::predict_table(&model, &prepared.test)?;
    Metrics::evaluate(&scores, &prepared.test.labels())
        .map_err(|e| prefix_data(e, &format!("fold {fold}")))
}

/// `k`-fold evaluation of `spec` using only the `features` columns.
///
/// SMOTE, when configured, is applied to each training split only; the test
/// split is scored untouched at threshold 0.5. Fold `f` fits with seed
/// `derive(spec.seed, "fit", f)` and oversamples with
/// `derive(smote.seed, "smote", f)`, independent of the feature mask.
pub fn cross_validate(
    table: &Table,
    spec: &ClassifierSpec,
    plan: &FoldPlan,
    smote: Option<&SmoteConfig>,
    features: &BTreeSet<String>,
) -> Result<CrossValidation> {
    let mut all = cross_validate_many(table, std::slice::from_ref(spec), plan, smote, features)?;
    Ok(all.remove(0))
}

/// [`cross_validate`] for several specs sharing each fold's (oversampled)
/// training split. Results follow the order of `specs`.
pub fn cross_validate_many(
    table: &Table,
    specs: &[ClassifierSpec],
    plan: &FoldPlan,
    smote: Option<&SmoteConfig>,
    features: &BTreeSet<String>,
) -> Result<Vec<CrossValidation>> {
    check_mask(table, features)?;
    for spec in specs {
        spec.validate()?;
    }
    if let Some(cfg) = smote {
        cfg.validate()?;
    }
    let masked = table.with_features(features)?;
    let prepared: Vec<PreparedFold> = (0..plan.k())
        .into_par_iter()
        .map(|fold| prepare_fold(&masked, plan, fold, smote))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|s| (0..plan.k()).map(move |f| (s, f)))
        .collect();
    let metrics: Vec<Metrics> = jobs
        .par_iter()
        .map(|&(s, f)| score_fold(&specs[s], &prepared[f]))
        .collect::<Result<_>>()?;
    let traces: Vec<FoldTrace> = prepared.into_iter().map(|p| p.trace).collect();
    Ok(specs
        .iter()
        .zip(metrics.chunks(plan.k()))
        .map(|(spec, folds)| CrossValidation {
            result: ClassifierResult::from_folds(spec.clone(), folds.to_vec()),
            traces: traces.clone(),
        })
        .collect())
}

/// Settings shared by every classifier in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub folds: usize,
    pub smote: Option<SmoteConfig>,
    pub features: Vec<String>,
}

/// Per-classifier fold summaries plus the across-classifier average column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub results: Vec<ClassifierResult>,
    pub config: EvalConfig,
}

impl EvalReport {
    /// A report from already-summarized classifier means and stds.
    pub fn from_summaries(
        summaries: Vec<(ClassifierKind, Metrics, Metrics)>,
        config: EvalConfig,
    ) -> Result<Self> {
        if summaries.is_empty() {
            return Err(Error::config("a report needs at least one classifier"));
        }
        let results = summaries
            .into_iter()
            .map(|(kind, mean, std)| ClassifierResult {
                spec: ClassifierSpec::new(kind, 0),
                folds: Vec::new(),
                mean,
                std,
            })
            .collect();
        Ok(EvalReport { results, config })
    }

    /// `(mean of the classifier means, mean of the classifier stds)`.
    pub fn average(&self) -> (Metrics, Metrics) {
        let means: Vec<Metrics> = self.results.iter().map(|r| r.mean).collect();
        let stds: Vec<Metrics> = self.results.iter().map(|r| r.std).collect();
        (Metrics::mean(&means), Metrics::mean(&stds))
    }

    pub fn result(&self, kind: ClassifierKind) -> Option<&ClassifierResult> {
        self.results.iter().find(|r| r.kind() == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub feature: String,
    pub with: EvalReport,
    pub without: EvalReport,
}

impl AblationReport {
    /// Average column of `with` minus that of `without`.
    pub fn delta(&self) -> Metrics {
        self.with.average().0.minus(&self.without.average().0)
    }
}

/// Evaluates every spec with all features and with all but `feature`, on
/// the same folds and seeds.
pub fn ablation(
    table: &Table,
    feature: &str,
    specs: &[ClassifierSpec],
    plan: &FoldPlan,
    smote: Option<&SmoteConfig>,
) -> Result<AblationReport> {
    let all: BTreeSet<String> = table
        .feature_names()
        .into_iter()
        .map(String::from)
        .collect();
    if !all.contains(feature) {
        return Err(Error::config(format!(
            "'{feature}' is not a feature column"
        )));
    }
    if specs.is_empty() {
        return Err(Error::config("no classifiers selected"));
    }
    let mut without = all.clone();
    without.remove(feature);
    if without.is_empty() {
        return Err(Error::config(format!(
            "'{feature}' is the only feature; nothing is left without it"
        )));
    }
    let arms = [&all, &without];
    let mut results: Vec<Vec<ClassifierResult>> = arms
        .par_iter()
        .map(|features| {
            cross_validate_many(table, specs, plan, smote, features)
                .map(|cvs| cvs.into_iter().map(|cv| cv.result).collect())
        })
        .collect::<Result<_>>()?;
    let without_results = results.pop().expect("two arms");
    let results = results.pop().expect("two arms");
    let report = |results, features: &BTreeSet<String>| EvalReport {
        results,
        config: EvalConfig {
            folds: plan.k(),
            smote: smote.copied(),
            features: features.iter().cloned().collect(),
        },
    };
    Ok(AblationReport {
        feature: feature.to_string(),
        with: report(results, &all),
        without: report(without_results, &without),
    })
}

/// A group left out of a per-group analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedGroup {
    pub group: String,
    pub rows: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRankings {
    /// Group value → its top attributes, best first.
    pub ranked: BTreeMap<String, Vec<String>>,
    pub skipped: Vec<SkippedGroup>,
}

/// Groups smaller than this are not weighed.
pub const MIN_GROUP_ROWS: usize = 20;

/// Top `top_n` attributes of each group, weighing all features except the
/// group column (constant within a group). ReliefF's `k` is lowered to fit
/// the smaller class of a group when needed.
pub fn per_group_rankings(
    table: &Table,
    top_n: usize,
    config: &WeighConfig,
) -> Result<GroupRankings> {
    let group_col = table
        .group_name()
        .ok_or_else(|| Error::config("table has no group column"))?
        .to_string();
    let features: BTreeSet<String> = table
        .feature_names()
        .into_iter()
        .filter(|f| *f != group_col)
        .map(String::from)
        .collect();
    if features.is_empty() {
        return Err(Error::data("no attributes besides the group column"));
    }
    let groups = table.group_values()?;
    let outcomes: Vec<std::result::Result<Vec<String>, SkippedGroup>> = groups
        .par_iter()
        .map(|g| -> Result<_> {
            let sub = filter_by_group(table, g)?;
            let n = sub.n_rows();
            let skip = |reason: String| {
                Ok(Err(SkippedGroup {
                    group: g.clone(),
                    rows: n,
                    reason,
                }))
            };
            if n < MIN_GROUP_ROWS {
                return skip(format!("fewer than {MIN_GROUP_ROWS} rows"));
            }
            let pos = sub.positive_count();
            let minority = pos.min(n - pos);
            if minority < 2 {
                return skip("a class has fewer than 2 rows".into());
            }
            let cfg = WeighConfig {
                relief_k: config.relief_k.min(minority - 1),
                ..*config
            };
            let m = weigh_all(&sub.with_features(&features)?, &cfg)?;
            Ok(Ok(m.top(top_n)))
        })
        .collect::<Result<_>>()?;
    let mut out = GroupRankings {
        ranked: BTreeMap::new(),
        skipped: Vec::new(),
    };
    for (g, o) in groups.into_iter().zip(outcomes) {
        match o {
            Ok(top) => {
                out.ranked.insert(g, top);
            }
            Err(s) => out.skipped.push(s),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupWinner {
    pub kind: ClassifierKind,
    pub rows: usize,
    pub mean: Metrics,
    pub std: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupWinners {
    pub winners: BTreeMap<String, GroupWinner>,
    pub skipped: Vec<SkippedGroup>,
}

/// Highest mean accuracy, then higher mean AUC, then smaller kind id.
pub fn pick_best(results: &[ClassifierResult]) -> Option<&ClassifierResult> {
    results.iter().min_by(|a, b| {
        b.mean
            .accuracy
            .total_cmp(&a.mean.accuracy)
            .then(b.mean.auc.total_cmp(&a.mean.auc))
            .then(a.kind().id().cmp(b.kind().id()))
    })
}

/// Per group: fresh stratified `k` folds (seeded with `fold_seed`), every
/// spec cross-validated on all features, winner by [`pick_best`]. Groups
/// below `max(20, 2k)` rows, or too small for the folds or SMOTE, are
/// skipped.
pub fn best_classifier_per_group(
    table: &Table,
    specs: &[ClassifierSpec],
    k: usize,
    fold_seed: u64,
    smote: Option<&SmoteConfig>,
) -> Result<GroupWinners> {
    if specs.is_empty() {
        return Err(Error::config("no classifiers selected"));
    }
    if k < 2 {
        return Err(Error::config(format!("k = {k} must be at least 2")));
    }
    let groups = table.group_values()?;
    let features: BTreeSet<String> = table
        .feature_names()
        .into_iter()
        .map(String::from)
        .collect();
    let floor = MIN_GROUP_ROWS.max(2 * k);
    let outcomes: Vec<std::result::Result<GroupWinner, SkippedGroup>> = groups
        .par_iter()
        .map(|g| -> Result<_> {
            let sub = filter_by_group(table, g)?;
            let n = sub.n_rows();
            let skip = |reason: String| {
                Ok(Err(SkippedGroup {
                    group: g.clone(),
                    rows: n,
                    reason,
                }))
            };
            if n < floor {
                return skip(format!("fewer than {floor} rows"));
            }
            let plan = match stratified_folds(&sub, k, fold_seed) {
                Ok(p) => p,
                Err(Error::Data(m)) => return skip(m),
                Err(e) => return Err(e),
            };
            let results: Vec<ClassifierResult> =
                match cross_validate_many(&sub, specs, &plan, smote, &features) {
                    Ok(r) => r.into_iter().map(|cv| cv.result).collect(),
                    Err(Error::Data(m)) => return skip(m),
                    Err(e) => return Err(e),
                };
            let best = pick_best(&results).expect("specs are non-empty");
            Ok(Ok(GroupWinner {
                kind: best.kind(),
                rows: n,
                mean: best.mean,
                std: best.std,
            }))
        })
        .collect::<Result<_>>()?;
    let mut out = GroupWinners {
        winners: BTreeMap::new(),
        skipped: Vec::new(),
    };
    for (g, o) in groups.into_iter().zip(outcomes) {
        match o {
            Ok(w) => {
                out.winners.insert(g, w);
            }
            Err(s) => out.skipped.push(s),
        }
    }
    Ok(out)
}
