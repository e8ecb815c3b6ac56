//! Command-line front end. All outputs of a run are rendered first and
//! written together at the end, so a failed run leaves no partial report.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::classifiers::{self, ClassifierKind, ClassifierSpec};
use crate::dataio::{load_csv, stratified_folds, write_csv, Schema, Table};
use crate::error::{Error, Result};
use crate::evaluation::{ablation, best_classifier_per_group, per_group_rankings};
use crate::report;
use crate::smote::{smote, SmoteConfig};
use crate::synth::{generate, SynthSpec};
use crate::weighting::{weigh_all, WeighConfig};

#[derive(Debug, Parser)]
#[command(
    name = "cohortweigh",
    version,
    about = "Feature weighting, ablation and per-group analysis of tabular cohorts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Rank every attribute with six weighting algorithms.
    Weigh,
    /// Cross-validate classifiers with and without one feature.
    Ablate,
    /// Top attributes and best classifier within each group.
    Groups,
    /// Generate a synthetic cohort.
    Synth,
    /// Run weigh, ablate and groups in one go.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Cohort CSV file.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Schema JSON file.
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub bins: usize,
    #[arg(long = "relief-k", global = true, default_value_t = 10)]
    pub relief_k: usize,
    #[arg(long = "smote-k", global = true, default_value_t = 5)]
    pub smote_k: usize,
    #[arg(long = "smote-ratio", global = true, default_value_t = 1.0)]
    pub smote_ratio: f64,
    /// Train on the original folds without oversampling.
    #[arg(long = "no-smote", global = true)]
    pub no_smote: bool,
    /// Feature to ablate (default: the schema's group column).
    #[arg(long, global = true)]
    pub feature: Option<String>,
    /// Comma-separated classifier ids, or `all`.
    #[arg(long, global = true, default_value = "all")]
    pub classifiers: String,
    /// Attributes listed per group.
    #[arg(long, global = true, default_value_t = 5)]
    pub top: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory for fitted models (one JSON file per classifier).
    #[arg(long = "save-model", global = true)]
    pub save_model: Option<PathBuf>,
    /// Synthetic cohort spec (JSON); the default nine-attribute cohort if absent.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Row count for `synth`, overriding the spec.
    #[arg(long, global = true)]
    pub rows: Option<usize>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::config("--folds must be at least 2"));
        }
        if self.bins < 2 {
            return Err(Error::config("--bins must be at least 2"));
        }
        if self.relief_k == 0 {
            return Err(Error::config("--relief-k must be at least 1"));
        }
        if self.top == 0 {
            return Err(Error::config("--top must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("--threads must be at least 1"));
        }
        self.smote_config().map_or(Ok(()), |c| c.validate())
    }

    pub fn smote_config(&self) -> Option<SmoteConfig> {
        (!self.no_smote).then_some(SmoteConfig {
            k_neighbors: self.smote_k,
            target_ratio: self.smote_ratio,
            seed: self.seed,
        })
    }

    pub fn weigh_config(&self) -> WeighConfig {
        WeighConfig {
            n_bins: self.bins,
            relief_k: self.relief_k,
            relief_anchors: None,
            seed: self.seed,
        }
    }

    pub fn specs(&self) -> Result<Vec<ClassifierSpec>> {
        let text = self.classifiers.trim();
        if text == "all" {
            return Ok(ClassifierSpec::all_defaults(self.seed));
        }
        let mut kinds: Vec<ClassifierKind> = Vec::new();
        for id in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let k: ClassifierKind = id.parse()?;
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
        if kinds.is_empty() {
            return Err(Error::config("--classifiers selects nothing"));
        }
        kinds.sort_by_key(|k| ClassifierKind::ALL.iter().position(|a| a == k));
        Ok(kinds
            .into_iter()
            .map(|k| ClassifierSpec::new(k, self.seed))
            .collect())
    }

    fn table(&self) -> Result<Table> {
        let data = self
            .data
            .as_ref()
            .ok_or_else(|| Error::config("--data is required"))?;
        let schema = self
            .schema
            .as_ref()
            .ok_or_else(|| Error::config("--schema is required"))?;
        let schema = Schema::from_json_file(schema)?;
        load_csv(data, &schema)
    }
}

/// Files produced by a run and their contents.
pub type Outputs = Vec<(PathBuf, String)>;

fn push(out: &mut Outputs, cfg: &RunConfig, name: &str, text: String) {
    out.push((cfg.out.join(name), text));
}

fn push_md(out: &mut Outputs, cfg: &RunConfig, name: &str, render: impl FnOnce() -> String) {
    if cfg.format == Format::Md {
        push(out, cfg, name, render());
    }
}

fn weigh_outputs(cfg: &RunConfig, table: &Table, out: &mut Outputs) -> Result<()> {
    let m = weigh_all(table, &cfg.weigh_config())?;
    push(out, cfg, "weights.csv", report::weigh_csv(&m));
    push_md(out, cfg, "weights.md", || report::weigh_markdown(&m));
    Ok(())
}

fn ablate_outputs(cfg: &RunConfig, table: &Table, out: &mut Outputs) -> Result<()> {
    let feature = match &cfg.feature {
        Some(f) => f.clone(),
        None => table
            .group_name()
            .ok_or_else(|| {
                Error::config("--feature is required when the schema has no group column")
            })?
            .to_string(),
    };
    let specs = cfg.specs()?;
    let plan = stratified_folds(table, cfg.folds, cfg.seed)?;
    let smote_cfg = cfg.smote_config();
    let a = ablation(table, &feature, &specs, &plan, smote_cfg.as_ref())?;
    push(out, cfg, "eval_without.csv", report::eval_csv(&a.without));
    push(out, cfg, "eval_with.csv", report::eval_csv(&a.with));
    push(out, cfg, "ablation_delta.csv", report::delta_csv(&a));
    push_md(out, cfg, "eval_without.md", || {
        report::eval_markdown(
            &a.without,
            &format!("Classification results without {feature}"),
        )
    });
    push_md(out, cfg, "eval_with.md", || {
        report::eval_markdown(&a.with, &format!("Classification results with {feature}"))
    });
    push_md(out, cfg, "ablation_delta.md", || report::delta_markdown(&a));

    if let Some(dir) = &cfg.save_model {
        let train = match &smote_cfg {
            Some(c) => smote(table, c)?,
            None => table.clone(),
        };
        for spec in &specs {
            let model = classifiers::fit(spec, &train)?;
            out.push((
                dir.join(format!("model_{}.json", spec.kind.id())),
                model.to_json(),
            ));
        }
    }
    Ok(())
}

fn groups_outputs(cfg: &RunConfig, table: &Table, out: &mut Outputs) -> Result<()> {
    let rankings = per_group_rankings(table, cfg.top, &cfg.weigh_config())?;
    let winners = best_classifier_per_group(
        table,
        &cfg.specs()?,
        cfg.folds,
        cfg.seed,
        cfg.smote_config().as_ref(),
    )?;
    for s in rankings.skipped.iter().chain(&winners.skipped) {
        eprintln!(
            "warning: group '{}' ({} rows) skipped: {}",
            s.group, s.rows, s.reason
        );
    }
    push(
        out,
        cfg,
        "group_rankings.csv",
        report::rankings_csv(&rankings, cfg.top),
    );
    push(out, cfg, "group_winners.csv", report::winners_csv(&winners));
    push_md(out, cfg, "group_rankings.md", || {
        report::rankings_markdown(&rankings, cfg.top)
    });
    push_md(out, cfg, "group_winners.md", || {
        report::winners_markdown(&winners)
    });
    Ok(())
}

fn synth_outputs(cfg: &RunConfig, out: &mut Outputs) -> Result<String> {
    let mut spec = match &cfg.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            SynthSpec::from_json(&text)?
        }
        None => SynthSpec::default_cohort(1000, cfg.seed),
    };
    if let Some(n) = cfg.rows {
        spec.n_rows = n;
    }
    if cfg.spec.is_none() {
        spec.seed = cfg.seed;
    }
    let cohort = generate(&spec)?;
    let mut csv = Vec::new();
    write_csv(&cohort.table, &mut csv)?;
    push(
        out,
        cfg,
        "cohort.csv",
        String::from_utf8(csv).expect("utf-8 csv"),
    );
    push(out, cfg, "schema.json", spec.schema().to_json());
    push(out, cfg, "truth.json", cohort.truth.to_json());
    let mut summary = format!(
        "rows: {}\nprevalence: {:.4} (target {:.4})\n",
        spec.n_rows, cohort.truth.realized_prevalence, spec.prevalence
    );
    for (g, n) in &cohort.truth.group_counts {
        summary += &format!("{}: {g} = {n}\n", spec.group_column);
    }
    Ok(summary)
}

/// Renders every output of `command` without touching the file system
/// (except for reading inputs). Returns the files and a stdout summary.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<(Outputs, String)> {
    cfg.validate()?;
    let mut out = Outputs::new();
    let summary = match command {
        Command::Synth => synth_outputs(cfg, &mut out)?,
        Command::Weigh => {
            weigh_outputs(cfg, &cfg.table()?, &mut out)?;
            String::new()
        }
        Command::Ablate => {
            ablate_outputs(cfg, &cfg.table()?, &mut out)?;
            String::new()
        }
        Command::Groups => {
            groups_outputs(cfg, &cfg.table()?, &mut out)?;
            String::new()
        }
        Command::Report => {
            let table = cfg.table()?;
            weigh_outputs(cfg, &table, &mut out)?;
            ablate_outputs(cfg, &table, &mut out)?;
            groups_outputs(cfg, &table, &mut out)?;
            String::new()
        }
    };
    Ok((out, summary))
}

fn write_outputs(files: &Outputs) -> Result<()> {
    for (path, text) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn run_parsed(cli: &Cli) -> Result<String> {
    let work = || -> Result<String> {
        let (files, mut summary) = execute(cli.command, &cli.run)?;
        write_outputs(&files)?;
        for (path, _) in &files {
            summary += &format!("wrote {}\n", path.display());
        }
        Ok(summary)
    };
    match cli.run.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Runs the CLI on `args` and returns the process exit code
/// (0 ok, 1 config, 2 data, 3 compute).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
