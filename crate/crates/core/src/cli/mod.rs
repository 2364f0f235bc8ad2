//! The `covfit` command line.
//!
//! ```text
//! covfit fit GRAPH (--data F [--transpose] | --cov F --n N | --corr F --n N) [options]
//! covfit msep GRAPH --a A --b B [--given S]
//! covfit equiv FILE
//! covfit project DAG
//! covfit compare [GRAPH data-source] | --random N [--p P] [--seed S]
//! ```
//!
//! Exit codes: 0 success, separated or equivalent; 1 connected or not
//! equivalent; 2 usage error; 3 data error; 4 numerical failure.
//! `COVFIT_LOG` (`off`, `info`, `trace`) enables diagnostics on standard
//! error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::anderson::{fit_anderson, AndersonOptions};
use crate::graph::{BidirectedGraph, ParsedGraph, SeparationQuery};
use crate::icf::{self, IcfOptions, Start};
use crate::random::{self, InstanceConfig, Truth};
use crate::Error;

mod input;
pub mod report;

pub use input::DataSource;
use report::{BenchRecord, BenchSummary, FitReport, InputDigest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// A failed command: an exit code and a one-line message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { code: EXIT_DATA, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Query(_) => EXIT_USAGE,
            Error::Numerical(_) | Error::NotPositiveDefinite { .. } => EXIT_NUMERICAL,
            _ => EXIT_DATA,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "covfit", version, about = "Maximum-likelihood fitting of Gaussian covariance graph models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a covariance graph model to data.
    Fit(FitArgs),
    /// Test m-separation in a bi-directed graph.
    Msep(MsepArgs),
    /// Check for a Markov-equivalent DAG (bi-directed input) or bi-directed graph (DAG input).
    Equiv(EquivArgs),
    /// Print the latent projection of a DAG as a bi-directed graph.
    Project(ProjectArgs),
    /// Run both algorithms on file input or seeded random instances.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Icf,
    Anderson,
}

#[derive(Debug, Args)]
#[group(id = "source", multiple = false)]
pub struct SourceArgs {
    /// Data CSV, one row per variable (`label, x1, ..., xn`).
    #[arg(long, group = "source")]
    pub data: Option<PathBuf>,
    /// Square covariance CSV with a header row of labels (requires --n).
    #[arg(long, group = "source", requires = "n")]
    pub cov: Option<PathBuf>,
    /// Lower-triangular correlation table with an SD row (requires --n).
    #[arg(long, group = "source", requires = "n")]
    pub corr: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Sample size for --cov and --corr input.
    #[arg(long)]
    pub n: Option<usize>,
    /// Treat the mean as known to be zero (no mean correction; n >= p suffices).
    #[arg(long)]
    pub centered: bool,
    /// Data CSV has one row per subject and a header row of labels.
    #[arg(long)]
    pub transpose: bool,
}

impl SampleArgs {
    fn source(&self) -> Result<Option<DataSource>, CliError> {
        let s = &self.source;
        if self.transpose && s.data.is_none() {
            return Err(CliError::usage("--transpose applies to --data input only"));
        }
        if s.data.is_some() && self.n.is_some() {
            return Err(CliError::usage("--n is taken from the data file; omit it with --data"));
        }
        Ok(match (&s.data, &s.cov, &s.corr) {
            (Some(path), _, _) => Some(DataSource::Data { path: path.clone(), transpose: self.transpose }),
            (_, Some(path), _) => Some(DataSource::Covariance { path: path.clone(), n: self.n.unwrap_or(0) }),
            (_, _, Some(path)) => Some(DataSource::Correlations { path: path.clone(), n: self.n.unwrap_or(0) }),
            _ => None,
        })
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Bi-directed graph file.
    pub graph: PathBuf,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[arg(long, value_enum, default_value = "icf")]
    pub algorithm: AlgorithmArg,
    /// Largest entry change per sweep, relative to max |S|.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_sigma: f64,
    /// Likelihood-equation residual target.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_residual: f64,
    /// Sweep limit (iteration limit for Anderson).
    #[arg(long, default_value_t = 5000)]
    pub max_sweeps: usize,
    /// Starting value: identity, diag, or file:PATH (covariance CSV).
    #[arg(long, default_value = "identity")]
    pub start: String,
    /// Extra ICF runs from random starting points; the best is reported.
    #[arg(long, default_value_t = 0)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MsepArgs {
    pub graph: PathBuf,
    /// Comma-separated vertex labels.
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value = "")]
    pub given: String,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    pub dag: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Bi-directed graph file (file mode).
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub sample: SampleArgs,
    /// Number of random instances, seeded --seed, --seed + 1, ...
    #[arg(long, conflicts_with_all = ["graph", "seeds"])]
    pub random: Option<usize>,
    /// Explicit comma-separated instance seeds.
    #[arg(long, conflicts_with = "graph")]
    pub seeds: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Variables per random instance.
    #[arg(long, default_value_t = 5)]
    pub p: usize,
    /// Edge probability of the random graphs.
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    /// Sample size of the random instances.
    #[arg(long = "sample-size", default_value_t = 50)]
    pub sample_size: usize,
    /// Draw the true covariance without the graph's zero pattern.
    #[arg(long)]
    pub misspecified: bool,
    #[arg(long, default_value_t = 5000)]
    pub max_sweeps: usize,
    /// Write the record stream here as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn run() -> i32 {
    init_logging();
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(&args, &mut stdout.lock(), &mut stderr.lock())
}

fn init_logging() {
    let level = std::env::var("COVFIT_LOG").unwrap_or_else(|_| "off".into());
    let filter = match level.as_str() {
        "info" => log::LevelFilter::Info,
        "trace" => log::LevelFilter::Trace,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new()
        .filter_level(filter)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Runs `covfit` with explicit arguments (the first is the program name).
pub fn run_with<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a, out, err),
        Command::Msep(a) => cmd_msep(a, out),
        Command::Equiv(a) => cmd_equiv(a, out),
        Command::Project(a) => cmd_project(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "covfit: {}", e.message);
            e.code
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::data(format!("write failed: {e}"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

/// Fits the model and returns the report; shared by the command and tests.
pub fn fit_report(args: &FitArgs) -> Result<FitReport, CliError> {
    let graph = input::load_bidirected(&args.graph)?;
    let source = args
        .sample
        .source()?
        .ok_or_else(|| CliError::usage("one of --data, --cov or --corr is required"))?;
    let loaded = input::load_sample(&source, args.sample.centered, &graph)?;
    let digest = InputDigest {
        graph_sha256: input::sha256_hex(graph.to_text().as_bytes()),
        data_sha256: loaded.digest,
        n: loaded.summary.n(),
        p: graph.len(),
        centered: args.sample.centered,
    };
    let summary = loaded.summary;
    let started = Instant::now();
    match args.algorithm {
        AlgorithmArg::Icf => {
            let start = match args.start.as_str() {
                "identity" => Start::Identity,
                "diag" => Start::DiagonalOfS,
                other => match other.strip_prefix("file:") {
                    Some(path) => Start::User(input::load_start(Path::new(path), &graph)?),
                    None => {
                        return Err(CliError::usage(format!(
                            "--start must be identity, diag or file:PATH, got `{other}`"
                        )))
                    }
                },
            };
            let opts = IcfOptions {
                max_sweeps: args.max_sweeps,
                tol_sigma: args.tol_sigma,
                tol_residual: args.tol_residual,
                start,
                restarts: args.restarts,
                seed: args.seed,
                ..Default::default()
            };
            let res = icf::fit(&summary, &graph, &opts)?;
            Ok(FitReport::from_icf(&res, digest, started.elapsed()))
        }
        AlgorithmArg::Anderson => {
            if args.start != "identity" || args.restarts > 0 {
                return Err(CliError::usage("Anderson's algorithm always starts from the identity"));
            }
            let opts = AndersonOptions { max_iters: args.max_sweeps, tol: args.tol_sigma };
            let res = fit_anderson(&summary, &graph, &opts)?;
            Ok(FitReport::from_anderson(&res, digest, started.elapsed()))
        }
    }
}

fn cmd_fit<W: Write, E: Write>(args: &FitArgs, out: &mut W, err: &mut E) -> Result<i32, CliError> {
    let report = fit_report(args)?;
    write!(out, "{}", report.to_table()).map_err(io_error)?;
    if let Some(path) = &args.out {
        write_file(path, &report.to_json())?;
    }
    match report.status.as_str() {
        "non_pd_iterate" | "singular_system" => {
            let _ = writeln!(err, "covfit: Anderson's algorithm stopped: {}", report.status);
            Ok(EXIT_NUMERICAL)
        }
        "converged" => Ok(EXIT_OK),
        other => {
            let _ = writeln!(err, "covfit: warning: {other}; the reported estimate is the last iterate");
            Ok(EXIT_OK)
        }
    }
}

fn split_labels(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn cmd_msep<W: Write>(args: &MsepArgs, out: &mut W) -> Result<i32, CliError> {
    let graph = input::load_bidirected(&args.graph)?;
    let query = SeparationQuery::new(
        graph.vertices(),
        &split_labels(&args.a),
        &split_labels(&args.b),
        &split_labels(&args.given),
    )?;
    match graph.m_connecting_path(&query)? {
        None => {
            writeln!(out, "separated").map_err(io_error)?;
            Ok(EXIT_OK)
        }
        Some(path) => {
            let labels: Vec<&str> = path.iter().map(|&v| graph.label(v)).collect();
            writeln!(out, "connected: {}", labels.join(" <-> ")).map_err(io_error)?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_equiv<W: Write>(args: &EquivArgs, out: &mut W) -> Result<i32, CliError> {
    let (line, code) = match input::load_any_graph(&args.file)? {
        ParsedGraph::Bidirected(g) => match g.dag_equivalence_obstruction() {
            None => ("equivalent DAG exists".to_string(), EXIT_OK),
            Some(w) => (format!("no equivalent DAG: {}", w.describe(&g)), EXIT_NEGATIVE),
        },
        ParsedGraph::Dag(d) => match d.bidirected_equivalence_obstruction()? {
            None => ("equivalent bi-directed graph exists".to_string(), EXIT_OK),
            Some(w) => (
                format!("no equivalent bi-directed graph: {}", w.describe(&d)),
                EXIT_NEGATIVE,
            ),
        },
    };
    writeln!(out, "{line}").map_err(io_error)?;
    Ok(code)
}

fn cmd_project<W: Write>(args: &ProjectArgs, out: &mut W) -> Result<i32, CliError> {
    let text = input::read_text(&args.dag)?;
    let dag = crate::graph::Dag::parse(&text).map_err(|e| CliError::data(format!("{}: {e}", args.dag.display())))?;
    let g: BidirectedGraph = dag.latent_projection()?;
    write!(out, "{}", g.to_text()).map_err(io_error)?;
    Ok(EXIT_OK)
}

fn compare_instance(
    seed: Option<u64>,
    summary: &crate::SampleSummary,
    graph: &BidirectedGraph,
    max_sweeps: usize,
) -> Result<BenchRecord, CliError> {
    let icf_opts = IcfOptions { max_sweeps, ..Default::default() };
    let icf = icf::fit(summary, graph, &icf_opts)?;
    let and_opts = AndersonOptions { max_iters: max_sweeps, ..Default::default() };
    let anderson = fit_anderson(summary, graph, &and_opts)?;
    Ok(BenchRecord::new(seed, graph.len(), graph.edge_count(), &icf, &anderson))
}

/// Benchmark records in instance order.
pub fn compare_records(args: &CompareArgs) -> Result<Vec<BenchRecord>, CliError> {
    if let Some(graph_path) = &args.graph {
        let graph = input::load_bidirected(graph_path)?;
        let source = args
            .sample
            .source()?
            .ok_or_else(|| CliError::usage("file mode needs one of --data, --cov or --corr"))?;
        let loaded = input::load_sample(&source, args.sample.centered, &graph)?;
        return Ok(vec![compare_instance(None, &loaded.summary, &graph, args.max_sweeps)?]);
    }
    let seeds: Vec<u64> = match (&args.seeds, args.random) {
        (Some(list), _) => split_labels(list)
            .iter()
            .map(|s| s.parse().map_err(|_| CliError::usage(format!("invalid seed `{s}`"))))
            .collect::<Result<_, _>>()?,
        (None, Some(count)) => (0..count as u64).map(|k| args.seed + k).collect(),
        (None, None) => return Err(CliError::usage("give a graph and data source, --random N or --seeds LIST")),
    };
    if args.p == 0 {
        return Err(CliError::usage("--p must be positive"));
    }
    let cfg = InstanceConfig {
        p: args.p,
        edge_prob: args.edge_prob,
        n: args.sample_size,
        truth: if args.misspecified { Truth::Dense } else { Truth::Model },
    };
    seeds
        .par_iter()
        .map(|&seed| {
            let inst = random::generate(seed, &cfg)?;
            compare_instance(Some(seed), &inst.summary, &inst.graph, args.max_sweeps)
        })
        .collect()
}

fn cmd_compare<W: Write>(args: &CompareArgs, out: &mut W) -> Result<i32, CliError> {
    let records = compare_records(args)?;
    let mut text = String::new();
    for r in &records {
        text.push_str(&serde_json::to_string(r).expect("record serializes"));
        text.push('\n');
    }
    let summary = serde_json::json!({ "summary": BenchSummary::from_records(&records) });
    text.push_str(&summary.to_string());
    text.push('\n');
    out.write_all(text.as_bytes()).map_err(io_error)?;
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    Ok(EXIT_OK)
}
