//! Command-line interface. Exit codes: 0 success, 1 usage error, 2 data
//! error, 3 benchmark accuracy below the requested floor.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::deadline::Deadline;
use crate::error::Result;
use crate::graph::{annotate_text, disambiguate_document, GraphConfig};
use crate::harness::{emit_report, run_benchmark, write_report, BenchOptions, Strategy};
use crate::index::InvertedIndex;
use crate::kb::{load_gold, load_queries, KnowledgeBase, Query, QueryType};
use crate::service;
use crate::topic::{self, TopicConfig};

#[derive(Parser)]
#[command(
    name = "nedkit",
    version,
    about = "Named-entity disambiguation over a local knowledge base"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_query_type(s: &str) -> std::result::Result<QueryType, String> {
    match s {
        "person" => Ok(QueryType::Person),
        "geo-political" => Ok(QueryType::GeoPolitical),
        "topic" => Ok(QueryType::Topic),
        "unknown" => Ok(QueryType::Unknown),
        other => Err(format!(
            "unknown query type {other:?}, expected person, geo-political, topic, or unknown"
        )),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load an entity dump, derive inlinks, and write the cleaned KB.
    Ingest {
        dump: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build the search index for a KB and write it to disk.
    Index {
        kb: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Disambiguate a single query document and print ranked labels.
    Query {
        kb: PathBuf,
        index: PathBuf,
        #[arg(long, default_value = "graph")]
        strategy: Strategy,
        /// Query name (the surface to disambiguate).
        #[arg(long)]
        name: String,
        #[arg(long = "type", value_parser = parse_query_type, default_value = "unknown")]
        query_type: QueryType,
        /// File holding the query document.
        #[arg(long)]
        doc: PathBuf,
        /// Sampler seed for the topic strategy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Annotate a text file with entity links (graph strategy).
    Annotate {
        kb: PathBuf,
        index: PathBuf,
        /// File holding the text to annotate.
        #[arg(long)]
        text: PathBuf,
    },
    /// Run a query set against gold labels and write a CSV report.
    Bench {
        kb: PathBuf,
        index: PathBuf,
        queries: PathBuf,
        gold: PathBuf,
        #[arg(long, default_value = "graph")]
        strategy: Strategy,
        /// Per-query wall-clock timeout in seconds.
        #[arg(long, default_value_t = 600.0)]
        timeout: f64,
        /// Report path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the runtime column as zeros so repeated runs compare
        /// byte-identical.
        #[arg(long)]
        redact_runtime: bool,
        /// Exit with code 3 when accuracy falls below this fraction.
        #[arg(long)]
        min_accuracy: Option<f64>,
        /// Sampler seed for the topic strategy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Serve the JSON HTTP API from a TOML config file.
    Serve { config: PathBuf },
}

pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            return code;
        }
    };
    // A consumer closing the pipe early (`nedkit query ... | head`) must
    // end the run quietly, not surface as a data error. The server keeps
    // SIGPIPE ignored: socket writes raise it too, and a dropped client
    // must not kill the process.
    #[cfg(unix)]
    if !matches!(cli.command, Command::Serve { .. }) {
        unsafe { libc::signal(libc::SIGPIPE, libc::SIG_DFL) };
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            2
        }
    }
}

fn load_pair(kb: &PathBuf, index: &PathBuf) -> Result<(KnowledgeBase, InvertedIndex)> {
    let (kb, report) = KnowledgeBase::load_dump(kb)?;
    if !report.is_clean() {
        for line in report.lines() {
            eprintln!("{line}");
        }
    }
    Ok((kb, InvertedIndex::load(index)?))
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Ingest { dump, output } => {
            let (kb, report) = KnowledgeBase::load_dump(&dump)?;
            kb.save_dump(&output)?;
            for line in report.lines() {
                println!("{line}");
            }
            Ok(0)
        }
        Command::Index { kb, output } => {
            let (kb, _) = KnowledgeBase::load_dump(&kb)?;
            InvertedIndex::build(&kb).save(&output)?;
            Ok(0)
        }
        Command::Query {
            kb,
            index,
            strategy,
            name,
            query_type,
            doc,
            seed,
        } => {
            let (kb, index) = load_pair(&kb, &index)?;
            let document = fs::read_to_string(doc)?;
            let query = Query {
                query_id: "cli".to_string(),
                query_type,
                name,
                context_document: document,
            };
            let result = match strategy {
                Strategy::Graph => disambiguate_document(
                    &kb,
                    &index,
                    &query.query_id,
                    &query.context_document,
                    &GraphConfig::default(),
                    &Deadline::never(),
                )?,
                Strategy::Topic => {
                    let mut config = TopicConfig::default();
                    if let Some(seed) = seed {
                        config.sampler.seed = seed;
                    }
                    topic::disambiguate_query(&kb, &index, &query, &config, &Deadline::never())?
                }
            };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for (label, score) in &result.ranked {
                let record = serde_json::json!({ "label": label, "score": score });
                writeln!(out, "{record}")?;
            }
            Ok(0)
        }
        Command::Annotate { kb, index, text } => {
            let (kb, index) = load_pair(&kb, &index)?;
            let document = fs::read_to_string(text)?;
            let result = disambiguate_document(
                &kb,
                &index,
                "cli",
                &document,
                &GraphConfig::default(),
                &Deadline::never(),
            )?;
            let annotations = result.annotations.unwrap_or_default();
            println!("{}", annotate_text(&document, &annotations));
            Ok(0)
        }
        Command::Bench {
            kb,
            index,
            queries,
            gold,
            strategy,
            timeout,
            output,
            redact_runtime,
            min_accuracy,
            seed,
        } => {
            let (kb, index) = load_pair(&kb, &index)?;
            let queries = load_queries(&queries)?;
            let gold = load_gold(&gold)?;
            let mut options = BenchOptions {
                strategy,
                timeout_s: timeout,
                ..BenchOptions::default()
            };
            if let Some(seed) = seed {
                options.topic.sampler.seed = seed;
            }
            let report = run_benchmark(&kb, &index, &queries, &gold, &options)?;
            match &output {
                Some(path) => emit_report(&report, path, redact_runtime)?,
                None => write_report(&report, std::io::stdout().lock(), redact_runtime)?,
            }
            let correct = report.per_query.iter().filter(|q| q.correct).count();
            eprintln!(
                "accuracy {:.4} ({}/{} correct, strategy {})",
                report.accuracy,
                correct,
                report.per_query.len(),
                report.strategy
            );
            if let Some(floor) = min_accuracy {
                if report.accuracy < floor {
                    eprintln!("accuracy {:.4} below required {floor:.4}", report.accuracy);
                    return Ok(3);
                }
            }
            Ok(0)
        }
        Command::Serve { config } => {
            let config = service::load_service_config(&config)?;
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()?;
            runtime.block_on(service::serve(config))?;
            Ok(0)
        }
    }
}
