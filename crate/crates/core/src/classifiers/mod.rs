//! Six binary classifiers behind one `fit` / `predict` surface.
//!
//! Every model scores the positive class in `[0, 1]`; the decision label is
//! positive iff the score is at least 0.5. Inputs are encoded by
//! [`Encoder`]: categoricals one-hot, numerics standardized for the linear
//! and neural kinds.

pub mod encoding;
pub mod forest;
pub mod gbt;
pub mod glm;
pub mod mlp;
pub mod rules;
pub mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use encoding::{Encoder, FeatureEncoding, Matrix};

use crate::dataio::{Cell, Table};
use crate::error::{Error, Result};
use crate::seed;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cross-entropy of a logit `z` against a 0/1 target.
#[inline]
pub(crate) fn log_loss(z: f64, y: f64) -> f64 {
    let softplus = if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    };
    softplus - y * z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    RuleInduction,
    Mlp,
    Glm,
    Gbt,
    DecisionTree,
    RandomForest,
}

impl ClassifierKind {
    /// Report column order.
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::RuleInduction,
        ClassifierKind::Mlp,
        ClassifierKind::Glm,
        ClassifierKind::Gbt,
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ClassifierKind::RuleInduction => "rule_induction",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::Glm => "glm",
            ClassifierKind::Gbt => "gbt",
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::RandomForest => "random_forest",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ClassifierKind::RuleInduction => "Rule Induction",
            ClassifierKind::Mlp => "Deep Learning",
            ClassifierKind::Glm => "Generalized Linear Model",
            ClassifierKind::Gbt => "Gradient Boosted Tree",
            ClassifierKind::DecisionTree => "Decision Tree",
            ClassifierKind::RandomForest => "Random Forest",
        }
    }

    /// `(key, default, min, max, integer)` for every accepted hyperparameter.
    fn hyperparameters(self) -> &'static [(&'static str, f64, f64, f64, bool)] {
        match self {
            ClassifierKind::DecisionTree => &[
                ("max_depth", 8.0, 1.0, 64.0, true),
                ("min_leaf", 5.0, 1.0, 1e9, true),
            ],
            ClassifierKind::RandomForest => &[
                ("n_trees", 100.0, 1.0, 1e5, true),
                ("max_depth", 16.0, 1.0, 64.0, true),
                ("min_leaf", 1.0, 1.0, 1e9, true),
                ("max_features", 0.0, 0.0, 1e6, true),
            ],
            ClassifierKind::Gbt => &[
                ("n_rounds", 100.0, 1.0, 1e5, true),
                ("max_depth", 3.0, 1.0, 16.0, true),
                ("min_leaf", 5.0, 1.0, 1e9, true),
                ("learning_rate", 0.1, 1e-6, 1.0, false),
                ("subsample", 1.0, 1e-3, 1.0, false),
            ],
            ClassifierKind::Glm => &[
                ("l2", 1e-4, 0.0, 1e6, false),
                ("tol", 1e-6, 1e-14, 1.0, false),
                ("max_iter", 500.0, 1.0, 1e6, true),
            ],
            ClassifierKind::Mlp => &[
                ("hidden", 16.0, 1.0, 4096.0, true),
                ("learning_rate", 0.01, 1e-8, 10.0, false),
                ("epochs", 200.0, 1.0, 1e6, true),
                ("batch_size", 32.0, 1.0, 1e9, true),
                ("init_scale", 0.1, 1e-8, 10.0, false),
            ],
            ClassifierKind::RuleInduction => &[
                ("min_coverage", 5.0, 1.0, 1e9, true),
                ("n_bins", 10.0, 2.0, 1e4, true),
                ("max_conditions", 8.0, 1.0, 1e3, true),
            ],
        }
    }

    fn standardizes(self) -> bool {
        matches!(self, ClassifierKind::Glm | ClassifierKind::Mlp)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::config(format!("unknown classifier '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, seed: u64) -> Self {
        ClassifierSpec {
            kind,
            hyperparameters: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.hyperparameters.insert(key.to_string(), value);
        self
    }

    /// One default spec per kind, in report order.
    pub fn all_defaults(seed: u64) -> Vec<ClassifierSpec> {
        ClassifierKind::ALL
            .into_iter()
            .map(|k| ClassifierSpec::new(k, seed))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let table = self.kind.hyperparameters();
        for (key, &value) in &self.hyperparameters {
            let Some(&(_, _, lo, hi, integer)) = table.iter().find(|(k, ..)| k == key) else {
                return Err(Error::config(format!(
                    "'{key}' is not a hyperparameter of {}",
                    self.kind
                )));
            };
            if !value.is_finite() || value < lo || value > hi {
                return Err(Error::config(format!(
                    "{}: {key} = {value} outside [{lo}, {hi}]",
                    self.kind
                )));
            }
            if integer && value.fract() != 0.0 {
                return Err(Error::config(format!(
                    "{}: {key} must be an integer",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> f64 {
        self.hyperparameters.get(key).copied().unwrap_or_else(|| {
            self.kind
                .hyperparameters()
                .iter()
                .find(|(k, ..)| *k == key)
                .map(|&(_, d, ..)| d)
                .expect("known hyperparameter")
        })
    }

    fn get_usize(&self, key: &str) -> usize {
        self.get(key) as usize
    }

    pub(crate) fn mlp_params(&self) -> mlp::MlpParams {
        mlp::MlpParams {
            hidden: self.get_usize("hidden"),
            learning_rate: self.get("learning_rate"),
            epochs: self.get_usize("epochs"),
            batch_size: self.get_usize("batch_size"),
            init_scale: self.get("init_scale"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Fitted {
    RuleInduction(rules::RuleList),
    Mlp(mlp::Mlp),
    Glm(glm::Logistic),
    Gbt(gbt::Booster),
    DecisionTree(tree::Tree),
    RandomForest(forest::Forest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    pub spec: ClassifierSpec,
    pub encoder: Encoder,
    pub fitted: Fitted,
}

impl Model {
    pub fn feature_names(&self) -> Vec<&str> {
        self.encoder.feature_names()
    }

    pub fn input_width(&self) -> usize {
        self.encoder.width()
    }

    fn score_encoded(&self, x: &[f64]) -> f64 {
        let s = match &self.fitted {
            Fitted::RuleInduction(m) => m.predict(x),
            Fitted::Mlp(m) => m.predict(x),
            Fitted::Glm(m) => m.predict(x),
            Fitted::Gbt(m) => m.predict(x),
            Fitted::DecisionTree(m) => m.predict(x),
            Fitted::RandomForest(m) => m.predict(x),
        };
        s.clamp(0.0, 1.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Model> {
        let m: Model = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::config(format!(
                "unsupported model format_version {}",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub const MIN_TRAIN_ROWS: usize = 10;

/// Fits `spec` on `train`. Rows are put in canonical content order first,
/// so the fitted model does not depend on the row order of `train`.
pub fn fit(spec: &ClassifierSpec, train: &Table) -> Result<Model> {
    spec.validate()?;
    if train.n_rows() < MIN_TRAIN_ROWS {
        return Err(Error::data(format!(
            "training needs at least {MIN_TRAIN_ROWS} rows, got {}",
            train.n_rows()
        )));
    }
    let pos = train.positive_count();
    if pos == 0 || pos == train.n_rows() {
        return Err(Error::data("training set has a single class"));
    }
    if train.feature_names().is_empty() {
        return Err(Error::data("training set has no feature columns"));
    }
    let train = train.select_rows(&train.canonical_order());
    let encoder = Encoder::fit(&train, spec.kind.standardizes());
    let x = encoder.encode_table(&train)?;
    let y: Vec<f64> = train
        .labels()
        .into_iter()
        .map(|b| f64::from(u8::from(b)))
        .collect();
    let fit_seed = seed::derive(spec.seed, spec.kind.id(), 0);
    let fitted = match spec.kind {
        ClassifierKind::DecisionTree => {
            Fitted::DecisionTree(tree::grow::<rand_chacha::ChaCha8Rng>(
                &x,
                tree::Target::Gini(&y),
                (0..x.rows()).collect(),
                tree::TreeParams {
                    max_depth: spec.get_usize("max_depth"),
                    min_leaf: spec.get_usize("min_leaf"),
                    max_features: None,
                },
                None,
            ))
        }
        ClassifierKind::RandomForest => Fitted::RandomForest(forest::Forest::fit(
            &x,
            &y,
            &forest::ForestParams {
                n_trees: spec.get_usize("n_trees"),
                max_depth: spec.get_usize("max_depth"),
                min_leaf: spec.get_usize("min_leaf"),
                max_features: spec.get_usize("max_features"),
            },
            fit_seed,
        )),
        ClassifierKind::Gbt => Fitted::Gbt(gbt::Booster::fit(
            &x,
            &y,
            &gbt::BoostParams {
                n_rounds: spec.get_usize("n_rounds"),
                max_depth: spec.get_usize("max_depth"),
                min_leaf: spec.get_usize("min_leaf"),
                learning_rate: spec.get("learning_rate"),
                subsample: spec.get("subsample"),
            },
            fit_seed,
        )),
        ClassifierKind::Glm => Fitted::Glm(glm::Logistic::fit(
            &x,
            &y,
            &glm::GlmParams {
                l2: spec.get("l2"),
                tol: spec.get("tol"),
                max_iter: spec.get_usize("max_iter"),
            },
        )),
        ClassifierKind::Mlp => Fitted::Mlp(mlp::Mlp::fit(&x, &y, &spec.mlp_params(), fit_seed)),
        ClassifierKind::RuleInduction => Fitted::RuleInduction(rules::RuleList::fit(
            &x,
            &y,
            &rules::RuleParams {
                min_coverage: spec.get_usize("min_coverage"),
                n_bins: spec.get_usize("n_bins"),
                max_conditions: spec.get_usize("max_conditions"),
            },
        )),
    };
    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        encoder,
        fitted,
    })
}

/// Positive-class score for one row given in `model.feature_names()` order.
pub fn predict(model: &Model, row: &[Cell]) -> Result<f64> {
    let x = model.encoder.encode_row(row)?;
    Ok(model.score_encoded(&x))
}

/// Scores every row of `table`; feature columns are matched by name.
pub fn predict_table(model: &Model, table: &Table) -> Result<Vec<f64>> {
    let x = model.encoder.encode_table(table)?;
    Ok((0..x.rows())
        .map(|i| model.score_encoded(x.row(i)))
        .collect())
}

/// Max relative error between the MLP's analytic loss gradient and central
/// finite differences, at a seeded random parameter point, on `train`.
pub fn mlp_gradient_check(spec: &ClassifierSpec, train: &Table, epsilon: f64) -> Result<f64> {
    if spec.kind != ClassifierKind::Mlp {
        return Err(Error::config("gradient check needs an mlp spec"));
    }
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::config(format!(
            "epsilon {epsilon} outside [1e-7, 1e-3]"
        )));
    }
    spec.validate()?;
    let encoder = Encoder::fit(train, true);
    let x = encoder.encode_table(train)?;
    let y: Vec<f64> = train
        .labels()
        .into_iter()
        .map(|b| f64::from(u8::from(b)))
        .collect();
    let params = spec.mlp_params();
    let mut rng = seed::stage_rng(spec.seed, "mlp_gradcheck", 0);
    let net = mlp::Mlp::random(x.cols(), params.hidden, 0.5, &mut rng);
    if net.n_params() < 20 {
        return Err(Error::config("gradient check needs at least 20 parameters"));
    }
    Ok(mlp::gradient_check(&net, &x, &y, epsilon))
}
