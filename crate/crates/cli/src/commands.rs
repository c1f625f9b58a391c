//! Argument parsing and dispatch for the `memento` binary.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use memento_bench::{
    analyze_pages, analyze_timegate, diff_report, run_load, summarize, Analysis, LoadOptions, Metric, VariantTable,
};
use memento_core::{format_http_datetime, Store};
use memento_harvester::{harvest_to_file, verify_dump, HarvestJob};
use memento_server::{serve_until, MementoService, ServerConfig};
use thiserror::Error;
use tokio::net::TcpListener;

use crate::audit::audit;
use crate::client::{http_client, negotiate};
use crate::model::{model_rows, render_table, ModelInputs};
use crate::walk::walk_timemap;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The operation ran and failed; exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "memento", version, about = "Datetime negotiation server, client and tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve a revision dump over HTTP.
    Serve(ServeArgs),
    /// Fetch page histories from a MediaWiki API into a revision dump.
    Harvest(HarvestArgs),
    /// Check a revision dump for malformed, duplicate or misordered records.
    VerifyDump { path: PathBuf },
    /// Find the memento of a resource closest to a datetime.
    Negotiate {
        url: String,
        /// HTTP-date, e.g. "Thu, 30 Jun 2011 00:00:00 GMT"; default now.
        #[arg(long)]
        datetime: Option<String>,
    },
    /// List every memento of a (possibly paged) TimeMap.
    Walk { url: String },
    /// Check a server's Memento behavior for one resource.
    Audit {
        url: String,
        #[arg(long)]
        datetime: Option<String>,
    },
    /// Evaluate the negotiation latency model.
    Model(ModelArgs),
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Revision dump to serve.
    #[arg(long)]
    pub dump: PathBuf,
    /// `key = value` configuration file.
    #[arg(long, env = "MEMENTO_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: String,
    /// `302`, `200` or `1.1`.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub page_size: Option<String>,
    /// `friendly` or `traditional`.
    #[arg(long)]
    pub error_page_type: Option<String>,
    #[arg(long)]
    pub recommended_relations: Option<String>,
    #[arg(long)]
    pub excluded_namespaces: Option<String>,
    /// Prefix for generated links; default `http://<listen>`.
    #[arg(long)]
    pub base_url: Option<String>,
}

#[derive(Debug, Args)]
pub struct HarvestArgs {
    /// api.php endpoint.
    #[arg(long)]
    pub api: String,
    /// One title per line; blank lines and `#` comments ignored.
    #[arg(long)]
    pub titles_file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = memento_harvester::MAX_BATCH_LIMIT)]
    pub batch_limit: u32,
    /// Pause between requests of one worker.
    #[arg(long, default_value_t = 0)]
    pub delay_ms: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Original resource generation time, seconds.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    /// Distinct TimeGate generation time, seconds.
    #[arg(long, default_value_t = 0.6)]
    pub b: f64,
    /// Self-negotiating TimeGate generation time, seconds.
    #[arg(long = "self-timegate", default_value_t = 1.24)]
    pub self_timegate: f64,
    /// Memento generation time, seconds.
    #[arg(long, default_value_t = 0.0)]
    pub m: f64,
    #[arg(long, default_value_t = 11_840.0)]
    pub bits: f64,
    #[arg(long, default_value_t = 28_800.0)]
    pub bandwidth: f64,
    /// One-way propagation delay, seconds.
    #[arg(long, default_value_t = 0.13)]
    pub propagation: f64,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Secs,
    Bytes,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Request every URL of a file and write a Siege-style log.
    Run {
        /// One URL per line.
        #[arg(long)]
        urls: PathBuf,
        #[arg(long, default_value_t = 1)]
        concurrency: usize,
        #[arg(long)]
        accept_datetime: Option<String>,
        /// Log file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-page TimeGate latency CSV from the 302 lines of a log.
    Timegate {
        log: PathBuf,
        /// `prefix=variant,...`
        #[arg(long)]
        prefixes: Option<String>,
    },
    /// Per-page CSV from the 200 lines of a log.
    Pages {
        log: PathBuf,
        #[arg(long, value_enum, default_value = "secs")]
        metric: MetricArg,
        #[arg(long)]
        prefixes: Option<String>,
    },
    /// Summaries and difference histograms over an analysis CSV.
    Stats {
        csv: PathBuf,
        /// Summarize a column (repeatable).
        #[arg(long)]
        column: Vec<String>,
        /// Per-page `A - B` differences.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        diff: Option<Vec<String>>,
        /// With --diff, print the 12 histogram buckets instead of the rows.
        #[arg(long, requires = "diff")]
        histogram: bool,
    },
}

/// Applies the config file then flag overrides on top of the defaults.
pub fn build_server_config(args: &ServeArgs) -> Result<ServerConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => ServerConfig::from_file(path).map_err(usage)?,
        None => ServerConfig::default(),
    };
    if args.base_url.is_none() && config.base_url == ServerConfig::default().base_url {
        config.base_url = format!("http://{}", args.listen);
    }
    let overrides = [
        ("negotiation_pattern", &args.pattern),
        ("timemap_page_size", &args.page_size),
        ("error_page_type", &args.error_page_type),
        ("recommended_relations", &args.recommended_relations),
        ("excluded_namespaces", &args.excluded_namespaces),
        ("base_url", &args.base_url),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, v).map_err(usage)?;
        }
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_list(path: &Path) -> Result<Vec<String>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in io::BufReader::new(file).lines() {
        let line = line.map_err(failure)?;
        let line = line.trim();
        if !line.is_empty() && !line.starts_with('#') {
            out.push(line.to_string());
        }
    }
    Ok(out)
}

fn table(prefixes: &Option<String>, default: VariantTable) -> Result<VariantTable, CliError> {
    prefixes.as_deref().map_or(Ok(default), |p| p.parse().map_err(usage))
}

fn emit_analysis(a: &Analysis, out: &mut impl Write) -> Result<(), CliError> {
    out.write_all(a.csv.as_bytes()).map_err(failure)?;
    for d in &a.diagnostics {
        eprintln!("{d}");
    }
    let c = a.counts;
    eprintln!(
        "lines={} consumed={} filtered={} unclassified={} skipped={}",
        c.total, c.consumed, c.filtered, c.unclassified, c.skipped
    );
    Ok(())
}

async fn serve_cmd(args: &ServeArgs) -> Result<(), CliError> {
    let config = build_server_config(args)?;
    let store = Store::load_dump(&args.dump).map_err(usage)?;
    let listener = TcpListener::bind(&args.listen).await.map_err(|e| usage(format!("{}: {e}", args.listen)))?;
    eprintln!(
        "serving {} pages at {} (pattern {}, page size {})",
        store.page_count(),
        config.base_url,
        config.negotiation_pattern,
        config.timemap_page_size
    );
    let service = Arc::new(MementoService::new(store, config));
    serve_until(listener, service, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .map_err(failure)
}

async fn bench_cmd(cmd: &BenchCommand, out: &mut impl Write) -> Result<(), CliError> {
    match cmd {
        BenchCommand::Run { urls, concurrency, accept_datetime, out: log_path } => {
            let urls = read_list(urls)?;
            let opts = LoadOptions { concurrency: *concurrency, accept_datetime: accept_datetime.clone(), ..Default::default() };
            match log_path {
                Some(p) => {
                    let mut f = io::BufWriter::new(std::fs::File::create(p).map_err(usage)?);
                    run_load(&urls, &opts, &mut f).await.map_err(failure)?;
                }
                None => {
                    run_load(&urls, &opts, out).await.map_err(failure)?;
                }
            }
        }
        BenchCommand::Timegate { log, prefixes } => {
            let a = analyze_timegate(&read_text(log)?, &table(prefixes, VariantTable::timegate_default())?);
            emit_analysis(&a, out)?;
        }
        BenchCommand::Pages { log, metric, prefixes } => {
            let metric = match metric {
                MetricArg::Secs => Metric::Secs,
                MetricArg::Bytes => Metric::Bytes,
            };
            let a = analyze_pages(&read_text(log)?, &table(prefixes, VariantTable::pages_default())?, metric);
            emit_analysis(&a, out)?;
        }
        BenchCommand::Stats { csv, column, diff, histogram } => {
            let text = read_text(csv)?;
            if column.is_empty() && diff.is_none() {
                return Err(usage("bench stats needs --column or --diff"));
            }
            if !column.is_empty() {
                writeln!(out, "COLUMN,MIN,MAX,MEAN,MEDIAN").map_err(failure)?;
            }
            for col in column {
                // A one-column diff against itself yields the column values.
                let report = diff_report(&text, col, col).map_err(usage)?;
                let values: Vec<f64> = report.rows.iter().map(|r| r.a).collect();
                let s = summarize(&values).map_err(failure)?;
                writeln!(out, "{col},{},{},{},{}", s.min, s.max, s.mean, s.median).map_err(failure)?;
            }
            if let Some(pair) = diff {
                let report = diff_report(&text, &pair[0], &pair[1]).map_err(usage)?;
                let body = if *histogram { report.buckets_csv() } else { report.rows_csv() };
                out.write_all(body.as_bytes()).map_err(failure)?;
            }
        }
    }
    Ok(())
}

/// Runs one command, writing its records to `out`.
pub async fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Serve(args) => serve_cmd(&args).await?,
        Command::Harvest(args) => {
            let mut job = HarvestJob::new(args.api, read_list(&args.titles_file)?);
            job.batch_limit = args.batch_limit;
            job.polite_delay = Duration::from_millis(args.delay_ms);
            job.workers = args.workers;
            job.validate().map_err(usage)?;
            let summary = harvest_to_file(&job, &args.out).await.map_err(failure)?;
            for title in &summary.missing {
                writeln!(out, "missing\t{title}").map_err(failure)?;
            }
            writeln!(out, "pages={} revisions={} requests={}", summary.pages, summary.revisions, summary.requests)
                .map_err(failure)?;
        }
        Command::VerifyDump { path } => {
            let report = verify_dump(&path).map_err(failure)?;
            for v in &report.violations {
                writeln!(out, "{v}").map_err(failure)?;
            }
            writeln!(out, "records={} pages={} violations={}", report.records, report.pages, report.violations.len())
                .map_err(failure)?;
            if !report.is_clean() {
                return Err(failure(format!("{} violations", report.violations.len())));
            }
        }
        Command::Negotiate { url, datetime } => {
            let m = negotiate(&http_client(), &url, datetime.as_deref()).await.map_err(failure)?;
            writeln!(out, "{}", m.line()).map_err(failure)?;
        }
        Command::Walk { url } => {
            let walked = walk_timemap(&http_client(), &url).await.map_err(failure)?;
            for m in &walked.mementos {
                writeln!(out, "{}\t{}", format_http_datetime(m.datetime), m.uri).map_err(failure)?;
            }
        }
        Command::Audit { url, datetime } => {
            let report = audit(&http_client(), &url, datetime.as_deref()).await.map_err(failure)?;
            for line in report.lines() {
                writeln!(out, "{line}").map_err(failure)?;
            }
            if !report.passed() {
                return Err(failure("conformance checks failed"));
            }
        }
        Command::Model(m) => {
            let inputs = ModelInputs {
                original_gen: m.a,
                timegate_gen: m.b,
                self_timegate_gen: m.self_timegate,
                memento_gen: m.m,
                payload_bits: m.bits,
                bandwidth_bps: m.bandwidth,
                propagation_delay: m.propagation,
            };
            let rows = model_rows(&inputs).map_err(usage)?;
            out.write_all(render_table(&rows, m.csv).as_bytes()).map_err(failure)?;
        }
        Command::Bench(cmd) => bench_cmd(&cmd, out).await?,
    }
    out.flush().map_err(failure)
}
