//! CSV and Markdown renderings of weight matrices, evaluation reports and
//! per-group analyses. CSV is canonical; every number has fixed precision
//! (weights 5 decimals, percentages and AUC 2 decimals).

use std::fmt::Write as _;

use crate::classifiers::ClassifierKind;
use crate::error::{Error, Result};
use crate::evaluation::{AblationReport, EvalReport, GroupRankings, GroupWinners, Metrics};
use crate::weighting::{Algorithm, WeightMatrix};

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn md_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out += &format!("|{}\n", "---|".repeat(header.len()));
    for r in rows {
        out += &format!("| {} |\n", r.join(" | "));
    }
    out
}

fn parse_rows(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers()?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::data(format!("'{s}' is not a number")))
}

/// Column names of the weights report.
pub fn weigh_header() -> Vec<String> {
    let mut h = vec!["attribute".to_string()];
    for a in Algorithm::ALL {
        h.push(format!("{}_rank", a.id()));
        h.push(format!("{}_weight", a.id()));
    }
    h.push("mean_rank".into());
    h.push("overall_rank".into());
    h
}

fn weigh_rows(m: &WeightMatrix) -> Vec<Vec<String>> {
    m.order()
        .into_iter()
        .map(|i| {
            let mut row = vec![m.attributes[i].clone()];
            for a in 0..6 {
                row.push(m.ranks[i][a].to_string());
                row.push(format!("{:.5}", m.weights[i][a]));
            }
            row.push(format!("{:.2}", m.mean_rank[i]));
            row.push(m.overall_rank[i].to_string());
            row
        })
        .collect()
}

/// One row per attribute in overall-rank order.
pub fn weigh_csv(m: &WeightMatrix) -> String {
    let mut out = csv_line(&weigh_header());
    for r in weigh_rows(m) {
        out += &csv_line(&r);
    }
    out
}

pub fn weigh_markdown(m: &WeightMatrix) -> String {
    let mut header = vec!["Attribute".to_string()];
    for a in Algorithm::ALL {
        header.push(format!("{} rank", a.title()));
        header.push(format!("{} weight", a.title()));
    }
    header.push("Mean rank".into());
    header.push("Overall rank".into());
    format!(
        "# Attribute weights\n\n{}",
        md_table(&header, &weigh_rows(m))
    )
}

/// Reads a weights report back. Ranks and overall ranks are taken as
/// written; mean ranks are recomputed from the ranks and must agree with
/// the written two-decimal values.
pub fn parse_weigh_csv(text: &str) -> Result<WeightMatrix> {
    let (header, rows) = parse_rows(text)?;
    if header != weigh_header() {
        return Err(Error::data("weights report header does not match"));
    }
    let mut m = WeightMatrix {
        attributes: Vec::new(),
        weights: Vec::new(),
        ranks: Vec::new(),
        mean_rank: Vec::new(),
        overall_rank: Vec::new(),
    };
    for r in rows {
        let mut ranks = [0usize; 6];
        let mut weights = [0.0; 6];
        for a in 0..6 {
            ranks[a] = number(&r[1 + 2 * a])? as usize;
            weights[a] = number(&r[2 + 2 * a])?;
        }
        let mean = ranks.iter().sum::<usize>() as f64 / 6.0;
        if (mean - number(&r[13])?).abs() > 0.005 + 1e-9 {
            return Err(Error::data(format!(
                "mean rank of '{}' disagrees with its ranks",
                r[0]
            )));
        }
        m.attributes.push(r[0].clone());
        m.ranks.push(ranks);
        m.weights.push(weights);
        m.mean_rank.push(mean);
        m.overall_rank.push(number(&r[14])? as usize);
    }
    Ok(m)
}

/// `(scale, label)` per metric: percentages for the first three, raw AUC.
fn metric_scale(metric: usize) -> f64 {
    if metric == 3 {
        1.0
    } else {
        100.0
    }
}

fn cell(mean: f64, std: f64, metric: usize) -> String {
    let s = metric_scale(metric);
    format!("{:.2} ± {:.2}", mean * s, std * s)
}

fn eval_rows(r: &EvalReport) -> Vec<Vec<String>> {
    let (avg_mean, avg_std) = r.average();
    (0..4)
        .map(|m| {
            let mut row = vec![Metrics::NAMES[m].to_string()];
            for c in &r.results {
                row.push(cell(c.mean.as_array()[m], c.std.as_array()[m], m));
            }
            row.push(cell(avg_mean.as_array()[m], avg_std.as_array()[m], m));
            row
        })
        .collect()
}

/// Rows are metrics, columns the classifiers then `average`; cells hold
/// "mean ± std" (accuracy, precision and recall in percent).
pub fn eval_csv(r: &EvalReport) -> String {
    let mut header = vec!["metric".to_string()];
    header.extend(r.results.iter().map(|c| c.kind().id().to_string()));
    header.push("average".into());
    let mut out = csv_line(&header);
    for row in eval_rows(r) {
        out += &csv_line(&row);
    }
    out
}

pub fn eval_markdown(r: &EvalReport, title: &str) -> String {
    let mut header = vec!["Metric".to_string()];
    header.extend(r.results.iter().map(|c| c.kind().title().to_string()));
    header.push("Average".into());
    format!("# {title}\n\n{}", md_table(&header, &eval_rows(r)))
}

/// A parsed evaluation report: `(metric, [(column, mean, std)])`, values
/// in the units written (percent or AUC).
pub type ParsedEval = Vec<(String, Vec<(String, f64, f64)>)>;

pub fn parse_eval_csv(text: &str) -> Result<ParsedEval> {
    let (header, rows) = parse_rows(text)?;
    if header.first().map(String::as_str) != Some("metric") {
        return Err(Error::data(
            "evaluation report must start with a metric column",
        ));
    }
    rows.into_iter()
        .map(|r| {
            let cells = header[1..]
                .iter()
                .zip(&r[1..])
                .map(|(col, c)| {
                    let (m, s) = c
                        .split_once('±')
                        .ok_or_else(|| Error::data(format!("cell '{c}' is not 'mean ± std'")))?;
                    Ok((col.clone(), number(m)?, number(s)?))
                })
                .collect::<Result<_>>()?;
            Ok((r[0].clone(), cells))
        })
        .collect()
}

fn delta_rows(a: &AblationReport) -> Vec<Vec<String>> {
    let without = a.without.average().0.as_array();
    let with = a.with.average().0.as_array();
    let delta = a.delta().as_array();
    (0..4)
        .map(|m| {
            let s = metric_scale(m);
            vec![
                Metrics::NAMES[m].to_string(),
                format!("{:.2}", without[m] * s),
                format!("{:.2}", with[m] * s),
                format!("{:+.2}", delta[m] * s),
            ]
        })
        .collect()
}

/// Average-column values without and with the feature and their difference.
pub fn delta_csv(a: &AblationReport) -> String {
    let mut out = csv_line(&["metric", "without", "with", "delta"].map(String::from));
    for row in delta_rows(a) {
        out += &csv_line(&row);
    }
    out
}

pub fn delta_markdown(a: &AblationReport) -> String {
    let header = [
        "Metric".to_string(),
        format!("Without {}", a.feature),
        format!("With {}", a.feature),
        "Change".into(),
    ];
    format!(
        "# Effect of {}\n\n{}",
        a.feature,
        md_table(&header, &delta_rows(a))
    )
}

/// Parses a delta report into `metric -> (without, with, delta)`.
pub fn parse_delta_csv(text: &str) -> Result<Vec<(String, [f64; 3])>> {
    let (header, rows) = parse_rows(text)?;
    if header != ["metric", "without", "with", "delta"] {
        return Err(Error::data("delta report header does not match"));
    }
    rows.into_iter()
        .map(|r| {
            Ok((
                r[0].clone(),
                [number(&r[1])?, number(&r[2])?, number(&r[3])?],
            ))
        })
        .collect()
}

fn rankings_rows(g: &GroupRankings, top_n: usize) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = g
        .ranked
        .iter()
        .map(|(group, top)| {
            let mut row = vec![group.clone(), "ranked".into()];
            row.extend((0..top_n).map(|i| top.get(i).cloned().unwrap_or_default()));
            row
        })
        .collect();
    for s in &g.skipped {
        let mut row = vec![s.group.clone(), "skipped".into()];
        row.extend((0..top_n).map(|_| String::new()));
        rows.push(row);
    }
    rows.sort();
    rows
}

fn rankings_header(top_n: usize) -> Vec<String> {
    let mut h = vec!["group".to_string(), "status".into()];
    h.extend((1..=top_n).map(|i| format!("top_{i}")));
    h
}

/// One row per group: its top attributes, or "skipped".
pub fn rankings_csv(g: &GroupRankings, top_n: usize) -> String {
    let mut out = csv_line(&rankings_header(top_n));
    for row in rankings_rows(g, top_n) {
        out += &csv_line(&row);
    }
    out
}

pub fn rankings_markdown(g: &GroupRankings, top_n: usize) -> String {
    format!(
        "# Top attributes per group\n\n{}",
        md_table(&rankings_header(top_n), &rankings_rows(g, top_n))
    )
}

const WINNER_HEADER: [&str; 8] = [
    "group",
    "status",
    "rows",
    "classifier",
    "accuracy",
    "precision",
    "recall",
    "auc",
];

fn winner_rows(w: &GroupWinners, titles: bool) -> Vec<Vec<String>> {
    let name = |k: ClassifierKind| {
        if titles {
            k.title().to_string()
        } else {
            k.id().to_string()
        }
    };
    let mut rows: Vec<Vec<String>> = w
        .winners
        .iter()
        .map(|(group, win)| {
            let mut row = vec![
                group.clone(),
                "evaluated".into(),
                win.rows.to_string(),
                name(win.kind),
            ];
            for m in 0..4 {
                row.push(cell(win.mean.as_array()[m], win.std.as_array()[m], m));
            }
            row
        })
        .collect();
    for s in &w.skipped {
        let mut row = vec![s.group.clone(), "skipped".into(), s.rows.to_string()];
        row.extend((0..5).map(|_| String::new()));
        rows.push(row);
    }
    rows.sort();
    rows
}

/// One row per group: the winning classifier and its metrics, or "skipped".
pub fn winners_csv(w: &GroupWinners) -> String {
    let mut out = csv_line(&WINNER_HEADER.map(String::from));
    for row in winner_rows(w, false) {
        out += &csv_line(&row);
    }
    out
}

pub fn winners_markdown(w: &GroupWinners) -> String {
    let header = [
        "Group",
        "Status",
        "Rows",
        "Best classifier",
        "Accuracy",
        "Precision",
        "Recall",
        "AUC",
    ]
    .map(String::from);
    let mut out = format!(
        "# Best classifier per group\n\n{}",
        md_table(&header, &winner_rows(w, true))
    );
    if !w.skipped.is_empty() {
        out += "\nSkipped groups:\n\n";
        for s in &w.skipped {
            let _ = writeln!(out, "- {} ({} rows): {}", s.group, s.rows, s.reason);
        }
    }
    out
}
