//! Synthetic cohorts with planted, group-dependent label mechanisms.
//!
//! Labels follow a logistic model: a group offset plus per-feature effects
//! (numerics enter standardized by their generating mean and sd, categoricals
//! as an indicator of "not the first listed value"), optional XOR-style
//! interaction, Gaussian noise, and a shared intercept. The intercept is
//! solved by bisection against the drawn uniforms so the realized prevalence
//! lands on the target.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::classifiers::sigmoid;
use crate::dataio::{Column, ColumnSchema, Schema, Table};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureDist {
    Numeric {
        mean: f64,
        sd: f64,
    },
    /// `(value, probability)`; the first value is the reference level.
    Categorical {
        values: Vec<(String, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub dist: FeatureDist,
}

/// `strength * sign(za) * sign(zb)` on two standardized numeric features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub a: String,
    pub b: String,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub probability: f64,
    /// Shift of the label log-odds for members of this group.
    #[serde(default)]
    pub offset: f64,
    /// Replaces the shared coefficients for this group when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Interaction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_rows: usize,
    pub seed: u64,
    /// Target share of positive labels.
    pub prevalence: f64,
    #[serde(default)]
    pub noise_sd: f64,
    pub group_column: String,
    pub label_column: String,
    pub positive_label: String,
    pub negative_label: String,
    pub groups: Vec<GroupSpec>,
    pub features: Vec<FeatureSpec>,
    #[serde(default)]
    pub coefficients: BTreeMap<String, f64>,
}

/// Cohort share of each group: Fars 50, Azari 12.75, Kurd 10, Gilak 6, and
/// 3.5 for each of the five smallest groups. These sum to 96.25 and are
/// normalized when used.
pub const DEFAULT_GROUP_SHARES: [(&str, f64); 9] = [
    ("Fars", 50.0),
    ("Azari", 12.75),
    ("Kurd", 10.0),
    ("Gilak", 6.0),
    ("Lor", 3.5),
    ("Arab", 3.5),
    ("Bakhtiari", 3.5),
    ("Qashghaei", 3.5),
    ("Balouch", 3.5),
];

fn default_features() -> Vec<FeatureSpec> {
    let num = |name: &str, mean: f64, sd: f64| FeatureSpec {
        name: name.into(),
        dist: FeatureDist::Numeric { mean, sd },
    };
    let binary = |name: &str, a: &str, b: &str, p_b: f64| FeatureSpec {
        name: name.into(),
        dist: FeatureDist::Categorical {
            values: vec![(a.into(), 1.0 - p_b), (b.into(), p_b)],
        },
    };
    vec![
        num("WC", 95.0, 12.0),
        num("age", 50.0, 8.0),
        num("BMI", 27.0, 4.5),
        binary("DM", "no", "yes", 0.2),
        binary("gender", "female", "male", 0.5),
        binary("HBP", "no", "yes", 0.3),
        num("LDL", 110.0, 35.0),
        binary("smoking", "no", "yes", 0.2),
    ]
}

fn coefficients(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl SynthSpec {
    fn base(n_rows: usize, seed: u64, coefs: &[(&str, f64)], offsets: &[f64]) -> SynthSpec {
        let total: f64 = DEFAULT_GROUP_SHARES.iter().map(|(_, s)| s).sum();
        let groups = DEFAULT_GROUP_SHARES
            .iter()
            .enumerate()
            .map(|(i, (name, share))| GroupSpec {
                name: name.to_string(),
                probability: share / total,
                offset: offsets.get(i).copied().unwrap_or(0.0),
                coefficients: None,
                interaction: None,
            })
            .collect();
        SynthSpec {
            n_rows,
            seed,
            prevalence: 0.64,
            noise_sd: 0.0,
            group_column: "ethnicity".into(),
            label_column: "cad".into(),
            positive_label: "yes".into(),
            negative_label: "no".into(),
            groups,
            features: default_features(),
            coefficients: coefficients(coefs),
        }
    }

    /// Nine-attribute cohort whose effect sizes loosely follow the published
    /// attribute ordering (gender, age, ethnicity, WC, ...).
    pub fn default_cohort(n_rows: usize, seed: u64) -> SynthSpec {
        Self::base(
            n_rows,
            seed,
            &[
                ("gender", 0.9),
                ("age", 0.7),
                ("WC", 0.45),
                ("smoking", 0.4),
                ("DM", 0.35),
                ("BMI", 0.15),
                ("HBP", 0.1),
                ("LDL", 0.05),
            ],
            &[0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5],
        )
    }

    /// Group offsets alternate `+effect, -effect, ...` over the groups in
    /// share order, so the group column carries signal only when `effect > 0`.
    pub fn planted_ablation(effect: f64, n_rows: usize, seed: u64) -> Result<SynthSpec> {
        if !(effect >= 0.0) || !effect.is_finite() {
            return Err(Error::config(format!("effect {effect} must be >= 0")));
        }
        let offsets: Vec<f64> = (0..DEFAULT_GROUP_SHARES.len())
            .map(|i| if i % 2 == 0 { effect } else { -effect })
            .collect();
        Ok(Self::base(
            n_rows,
            seed,
            &[
                ("gender", 0.8),
                ("age", 0.6),
                ("WC", 0.4),
                ("smoking", 0.35),
                ("DM", 0.3),
                ("BMI", 0.1),
                ("HBP", 0.05),
            ],
            &offsets,
        ))
    }

    /// Strong numeric and categorical effects; every classifier should
    /// separate the classes well.
    pub fn separable(n_rows: usize, seed: u64) -> SynthSpec {
        Self::base(
            n_rows,
            seed,
            &[("age", 6.0), ("WC", 5.0), ("gender", 4.0)],
            &[],
        )
    }

    /// All effects zero: the label is independent of every attribute.
    pub fn null(n_rows: usize, seed: u64) -> SynthSpec {
        Self::base(n_rows, seed, &[], &[])
    }

    /// Two equal groups: "linear" follows a logistic model in age and WC,
    /// "xor" depends only on the sign pattern of age and WC.
    pub fn linear_and_xor(n_rows: usize, seed: u64) -> SynthSpec {
        let mut s = Self::base(n_rows, seed, &[], &[]);
        s.prevalence = 0.5;
        s.groups = vec![
            GroupSpec {
                name: "linear".into(),
                probability: 0.5,
                offset: 0.0,
                coefficients: Some(coefficients(&[("age", 1.5), ("WC", 1.0)])),
                interaction: None,
            },
            GroupSpec {
                name: "xor".into(),
                probability: 0.5,
                offset: 0.0,
                coefficients: Some(BTreeMap::new()),
                interaction: Some(Interaction {
                    a: "age".into(),
                    b: "WC".into(),
                    strength: 4.0,
                }),
            },
        ];
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows < 100 {
            return Err(Error::config("synthetic cohorts need n_rows >= 100"));
        }
        if !(self.prevalence > 0.0 && self.prevalence < 1.0) {
            return Err(Error::config("prevalence must lie in (0, 1)"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::config("noise_sd must be finite and >= 0"));
        }
        if self.groups.is_empty() {
            return Err(Error::config("at least one group is required"));
        }
        let total: f64 = self.groups.iter().map(|g| g.probability).sum();
        if (total - 1.0).abs() > 1e-9 || self.groups.iter().any(|g| !(g.probability >= 0.0)) {
            return Err(Error::config(format!(
                "group probabilities must be >= 0 and sum to 1 (got {total})"
            )));
        }
        let mut names: Vec<&str> = self.features.iter().map(|f| f.name.as_str()).collect();
        names.push(&self.group_column);
        names.push(&self.label_column);
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::config(
                "feature, group and label names must be unique",
            ));
        }
        if self.positive_label == self.negative_label {
            return Err(Error::config("positive and negative labels must differ"));
        }
        for f in &self.features {
            match &f.dist {
                FeatureDist::Numeric { mean, sd } => {
                    if !mean.is_finite() || !(*sd > 0.0) || !sd.is_finite() {
                        return Err(Error::config(format!("feature '{}' needs sd > 0", f.name)));
                    }
                }
                FeatureDist::Categorical { values } => {
                    let t: f64 = values.iter().map(|(_, p)| p).sum();
                    if values.is_empty()
                        || (t - 1.0).abs() > 1e-9
                        || values.iter().any(|(_, p)| !(*p >= 0.0))
                    {
                        return Err(Error::config(format!(
                            "feature '{}' value probabilities must sum to 1",
                            f.name
                        )));
                    }
                }
            }
        }
        let known = |n: &str| self.features.iter().any(|f| f.name == n);
        let numeric = |n: &str| {
            self.features
                .iter()
                .any(|f| f.name == n && matches!(f.dist, FeatureDist::Numeric { .. }))
        };
        for g in &self.groups {
            let coefs = g.coefficients.as_ref().unwrap_or(&self.coefficients);
            if let Some(bad) = coefs.keys().find(|k| !known(k)) {
                return Err(Error::config(format!(
                    "coefficient for unknown feature '{bad}'"
                )));
            }
            if coefs.values().any(|v| !v.is_finite()) || !g.offset.is_finite() {
                return Err(Error::config("coefficients must be finite"));
            }
            if let Some(i) = &g.interaction {
                if !numeric(&i.a) || !numeric(&i.b) {
                    return Err(Error::config("interactions need two numeric features"));
                }
            }
        }
        if let Some(bad) = self.coefficients.keys().find(|k| !known(k)) {
            return Err(Error::config(format!(
                "coefficient for unknown feature '{bad}'"
            )));
        }
        Ok(())
    }

    pub fn schema(&self) -> Schema {
        let mut cols: Vec<ColumnSchema> = self
            .features
            .iter()
            .map(|f| match f.dist {
                FeatureDist::Numeric { .. } => ColumnSchema::numeric(&f.name),
                FeatureDist::Categorical { .. } => ColumnSchema::categorical(&f.name),
            })
            .collect();
        cols.push(ColumnSchema::group(&self.group_column));
        cols.push(ColumnSchema::label(
            &self.label_column,
            &self.positive_label,
        ));
        Schema::new(cols).expect("validated synth spec yields a valid schema")
    }

    pub fn from_json(text: &str) -> Result<SynthSpec> {
        let s: SynthSpec = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// Effective label mechanism, emitted next to the generated cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub intercept: f64,
    pub target_prevalence: f64,
    pub realized_prevalence: f64,
    pub group_counts: BTreeMap<String, usize>,
    pub groups: Vec<GroundTruthGroup>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthGroup {
    pub name: String,
    pub offset: f64,
    pub coefficients: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Interaction>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("truth serializes")
    }
}

#[derive(Debug, Clone)]
pub struct Cohort {
    pub table: Table,
    pub truth: GroundTruth,
}

fn draw_categorical<R: Rng>(rng: &mut R, probs: impl Iterator<Item = f64>, len: usize) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    len - 1
}

pub fn generate(spec: &SynthSpec) -> Result<Cohort> {
    spec.validate()?;
    let n = spec.n_rows;
    let mut rng = seed::stage_rng(spec.seed, "synth", 0);
    let noise = Normal::new(0.0, spec.noise_sd.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::config(e.to_string()))?;

    let mut groups = Vec::with_capacity(n);
    let mut numeric: Vec<Vec<f64>> = vec![Vec::with_capacity(n); spec.features.len()];
    let mut categorical: Vec<Vec<String>> = vec![Vec::with_capacity(n); spec.features.len()];
    // standardized value (numeric) or non-reference indicator (categorical)
    let mut effect_inputs: Vec<Vec<f64>> = vec![Vec::with_capacity(n); spec.features.len()];
    let mut scores = Vec::with_capacity(n);
    let mut uniforms = Vec::with_capacity(n);

    for _ in 0..n {
        let g = draw_categorical(
            &mut rng,
            spec.groups.iter().map(|g| g.probability),
            spec.groups.len(),
        );
        groups.push(g);
        for (fi, f) in spec.features.iter().enumerate() {
            match &f.dist {
                FeatureDist::Numeric { mean, sd } => {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    numeric[fi].push(mean + sd * z);
                    effect_inputs[fi].push(z);
                }
                FeatureDist::Categorical { values } => {
                    let v =
                        draw_categorical(&mut rng, values.iter().map(|(_, p)| *p), values.len());
                    categorical[fi].push(values[v].0.clone());
                    effect_inputs[fi].push(if v == 0 { 0.0 } else { 1.0 });
                }
            }
        }
        let eps = if spec.noise_sd > 0.0 {
            noise.sample(&mut rng)
        } else {
            0.0
        };
        uniforms.push(rng.random::<f64>());
        scores.push(eps);
    }

    let feature_index: BTreeMap<&str, usize> = spec
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| (f.name.as_str(), i))
        .collect();
    for (i, s) in scores.iter_mut().enumerate() {
        let g = &spec.groups[groups[i]];
        let coefs = g.coefficients.as_ref().unwrap_or(&spec.coefficients);
        *s += g.offset;
        for (name, beta) in coefs {
            *s += beta * effect_inputs[feature_index[name.as_str()]][i];
        }
        if let Some(inter) = &g.interaction {
            let za = effect_inputs[feature_index[inter.a.as_str()]][i];
            let zb = effect_inputs[feature_index[inter.b.as_str()]][i];
            *s += inter.strength * za.signum() * zb.signum();
        }
    }

    let target = (spec.prevalence * n as f64).round() as usize;
    let count = |c: f64| {
        scores
            .iter()
            .zip(&uniforms)
            .filter(|(s, u)| **u < sigmoid(c + **s))
            .count()
    };
    let (mut lo, mut hi) = (-60.0_f64, 60.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let intercept = hi;
    let labels: Vec<bool> = scores
        .iter()
        .zip(&uniforms)
        .map(|(s, u)| *u < sigmoid(intercept + s))
        .collect();

    let mut columns: Vec<Column> = spec
        .features
        .iter()
        .enumerate()
        .map(|(fi, f)| match f.dist {
            FeatureDist::Numeric { .. } => Column::Numeric(std::mem::take(&mut numeric[fi])),
            FeatureDist::Categorical { .. } => {
                Column::Categorical(std::mem::take(&mut categorical[fi]))
            }
        })
        .collect();
    columns.push(Column::Categorical(
        groups
            .iter()
            .map(|&g| spec.groups[g].name.clone())
            .collect(),
    ));
    columns.push(Column::Categorical(
        labels
            .iter()
            .map(|&y| {
                if y {
                    spec.positive_label.clone()
                } else {
                    spec.negative_label.clone()
                }
            })
            .collect(),
    ));
    let table = Table::new(spec.schema(), columns, &spec.negative_label)?;

    let mut group_counts: BTreeMap<String, usize> = BTreeMap::new();
    for &g in &groups {
        *group_counts.entry(spec.groups[g].name.clone()).or_default() += 1;
    }
    let truth = GroundTruth {
        intercept,
        target_prevalence: spec.prevalence,
        realized_prevalence: labels.iter().filter(|&&y| y).count() as f64 / n as f64,
        group_counts,
        groups: spec
            .groups
            .iter()
            .map(|g| GroundTruthGroup {
                name: g.name.clone(),
                offset: g.offset,
                coefficients: g
                    .coefficients
                    .clone()
                    .unwrap_or_else(|| spec.coefficients.clone()),
                interaction: g.interaction.clone(),
            })
            .collect(),
    };
    Ok(Cohort { table, truth })
}

/// Shorthand for the effect-sized ablation cohort.
pub fn planted_ablation_spec(effect: f64) -> Result<SynthSpec> {
    SynthSpec::planted_ablation(effect, 5000, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shares_normalize() {
        let s = SynthSpec::default_cohort(1000, 1);
        let total: f64 = s.groups.iter().map(|g| g.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((s.groups[0].probability - 50.0 / 96.25).abs() < 1e-12);
        s.validate().unwrap();
    }

    #[test]
    fn prevalence_hits_target() {
        for seed in 0..5 {
            let c = generate(&SynthSpec::default_cohort(1000, seed)).unwrap();
            assert!((c.truth.realized_prevalence - 0.64).abs() <= 0.02);
        }
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate(&SynthSpec::default_cohort(300, 4)).unwrap();
        let b = generate(&SynthSpec::default_cohort(300, 4)).unwrap();
        let c = generate(&SynthSpec::default_cohort(300, 5)).unwrap();
        assert_eq!(a.table, b.table);
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = SynthSpec::default_cohort(1000, 0);
        s.groups[0].probability = 0.9;
        assert!(s.validate().is_err());
        let mut s = SynthSpec::default_cohort(50, 0);
        assert!(s.validate().is_err());
        s.n_rows = 500;
        s.prevalence = 1.0;
        assert!(s.validate().is_err());
        assert!(SynthSpec::planted_ablation(-1.0, 500, 0).is_err());
        let mut s = SynthSpec::default_cohort(500, 0);
        s.coefficients.insert("height".into(), 1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = SynthSpec::linear_and_xor(400, 2);
        let back = SynthSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
