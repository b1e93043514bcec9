//! Benchmark harness: runs a query set under a per-query wall-clock
//! timeout, scores each strategy by its own protocol, fits runtime against
//! document size, and writes plot-ready CSV reports.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::{disambiguate_document, GraphConfig};
use crate::index::InvertedIndex;
use crate::kb::{DisambiguationResult, KnowledgeBase, Label, Query};
use crate::textproc::{spot_mentions, tokenize};
use crate::topic;
use crate::topic::TopicConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Graph,
    Topic,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Graph => write!(f, "graph"),
            Strategy::Topic => write!(f, "topic"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph" => Ok(Strategy::Graph),
            "topic" => Ok(Strategy::Topic),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?}, expected graph or topic"
            ))),
        }
    }
}

/// One benchmarked query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub query_id: String,
    /// Ranked labels, best first; empty when the query timed out.
    pub predicted: Vec<Label>,
    pub gold: Label,
    pub correct: bool,
    pub runtime_seconds: f64,
    pub timed_out: bool,
    pub mention_count: usize,
    pub doc_token_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub strategy: Strategy,
    pub per_query: Vec<QueryOutcome>,
    /// Correct count over total count; 0 for an empty query set.
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub strategy: Strategy,
    pub timeout_s: f64,
    pub graph: GraphConfig,
    pub topic: TopicConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            strategy: Strategy::Graph,
            timeout_s: 600.0,
            graph: GraphConfig::default(),
            topic: TopicConfig::default(),
        }
    }
}

/// Scoring protocols differ by strategy: the graph strategy is correct
/// when the gold entity appears anywhere among its assigned labels (or
/// gold is NIL and nothing was assigned); the topic strategy must rank
/// the gold label first.
pub fn score_query(predicted: &DisambiguationResult, gold: &Label, strategy: Strategy) -> bool {
    match strategy {
        Strategy::Graph => {
            let assigned: Vec<&Label> = predicted
                .ranked
                .iter()
                .map(|(l, _)| l)
                .filter(|l| **l != Label::Nil)
                .collect();
            match gold {
                Label::Nil => assigned.is_empty(),
                entity => assigned.contains(&entity),
            }
        }
        Strategy::Topic => predicted.top() == Some(gold),
    }
}

/// Runs every query under `timeout_s`. Gold coverage is checked up front
/// so a missing label aborts before any query runs. Timeouts are
/// cooperative (strategies poll a deadline) with a measured-elapsed
/// backstop; timed-out queries count as incorrect.
pub fn run_benchmark(
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    queries: &[Query],
    gold: &BTreeMap<String, Label>,
    options: &BenchOptions,
) -> Result<BenchReport> {
    if !(options.timeout_s.is_finite() && options.timeout_s > 0.0) {
        return Err(Error::Config(format!(
            "timeout_s must be positive, got {}",
            options.timeout_s
        )));
    }
    for query in queries {
        if !gold.contains_key(&query.query_id) {
            return Err(Error::MissingGold(query.query_id.clone()));
        }
    }

    let mut per_query = Vec::with_capacity(queries.len());
    for query in queries {
        let gold_label = gold[&query.query_id].clone();
        let tokens = tokenize(&query.context_document);
        let mention_count = spot_mentions(&tokens, kb.aliases(), None).len();
        let doc_token_count = tokens.len();

        let deadline = Deadline::after_secs(options.timeout_s);
        let started = Instant::now();
        let outcome = run_query(kb, index, query, options, &deadline);
        let runtime_seconds = started.elapsed().as_secs_f64();

        let (predicted, mut timed_out) = match outcome {
            Ok(result) => (result, false),
            Err(Error::Timeout) => (empty_result(&query.query_id), true),
            Err(other) => return Err(other),
        };
        timed_out = timed_out || runtime_seconds > options.timeout_s;
        let correct = !timed_out && score_query(&predicted, &gold_label, options.strategy);
        per_query.push(QueryOutcome {
            query_id: query.query_id.clone(),
            predicted: if timed_out {
                Vec::new()
            } else {
                predicted.ranked.into_iter().map(|(l, _)| l).collect()
            },
            gold: gold_label,
            correct,
            runtime_seconds,
            timed_out,
            mention_count,
            doc_token_count,
        });
    }

    let correct = per_query.iter().filter(|q| q.correct).count();
    let accuracy = if per_query.is_empty() {
        0.0
    } else {
        correct as f64 / per_query.len() as f64
    };
    Ok(BenchReport {
        strategy: options.strategy,
        per_query,
        accuracy,
    })
}

fn run_query(
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    query: &Query,
    options: &BenchOptions,
    deadline: &Deadline,
) -> Result<DisambiguationResult> {
    match options.strategy {
        Strategy::Graph => disambiguate_document(
            kb,
            index,
            &query.query_id,
            &query.context_document,
            &options.graph,
            deadline,
        ),
        Strategy::Topic => topic::disambiguate_query(kb, index, query, &options.topic, deadline),
    }
}

fn empty_result(query_id: &str) -> DisambiguationResult {
    DisambiguationResult {
        query_id: query_id.to_string(),
        ranked: Vec::new(),
        annotations: None,
    }
}

/// Least-squares line through runtime as a function of size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeRegression {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation; 0 when the runtimes are constant.
    pub r: f64,
}

/// Fits runtime against the strategy's size measure: mention count for
/// the graph strategy, document token count for the topic strategy.
/// Timed-out entries are excluded.
pub fn runtime_regression(report: &BenchReport) -> Result<RuntimeRegression> {
    let points: Vec<(f64, f64)> = report
        .per_query
        .iter()
        .filter(|q| !q.timed_out)
        .map(|q| {
            let x = match report.strategy {
                Strategy::Graph => q.mention_count,
                Strategy::Topic => q.doc_token_count,
            };
            (x as f64, q.runtime_seconds)
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "runtime regression needs at least 3 completed queries, got {}",
            points.len()
        )));
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let syy: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "runtime regression needs at least two distinct sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r = if syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(RuntimeRegression {
        slope,
        intercept,
        r,
    })
}

pub const REPORT_HEADER: [&str; 7] = [
    "query_id",
    "strategy",
    "correct",
    "timed_out",
    "runtime_s",
    "mentions",
    "doc_tokens",
];

/// Writes the per-query rows sorted by query id, then one summary row
/// whose columns are: "summary", strategy, accuracy, timed-out count,
/// total runtime, total mentions, total doc tokens. `redact_runtime`
/// zeroes the runtime column so reports from repeated runs compare
/// byte-for-byte.
pub fn write_report<W: Write>(report: &BenchReport, writer: W, redact_runtime: bool) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(REPORT_HEADER)?;

    let runtime = |seconds: f64| {
        if redact_runtime {
            "0.000000".to_string()
        } else {
            format!("{seconds:.6}")
        }
    };
    let mut rows: Vec<&QueryOutcome> = report.per_query.iter().collect();
    rows.sort_by(|a, b| a.query_id.cmp(&b.query_id));
    for row in &rows {
        csv.write_record([
            row.query_id.as_str(),
            &report.strategy.to_string(),
            &row.correct.to_string(),
            &row.timed_out.to_string(),
            &runtime(row.runtime_seconds),
            &row.mention_count.to_string(),
            &row.doc_token_count.to_string(),
        ])?;
    }

    let timed_out = rows.iter().filter(|r| r.timed_out).count();
    // fold from +0.0: the Sum identity is -0.0, which would print as
    // "-0.000000" for an empty report.
    let total_runtime: f64 = rows.iter().fold(0.0, |acc, r| acc + r.runtime_seconds);
    let total_mentions: usize = rows.iter().map(|r| r.mention_count).sum();
    let total_tokens: usize = rows.iter().map(|r| r.doc_token_count).sum();
    csv.write_record([
        "summary",
        &report.strategy.to_string(),
        &format!("{:.6}", report.accuracy),
        &timed_out.to_string(),
        &runtime(total_runtime),
        &total_mentions.to_string(),
        &total_tokens.to_string(),
    ])?;
    csv.flush()?;
    Ok(())
}

pub fn emit_report(
    report: &BenchReport,
    path: impl AsRef<Path>,
    redact_runtime: bool,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_report(report, file, redact_runtime)
}
