//! Loading graphs and sample summaries from files.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::CliError;
use crate::gaussian::io::{read_correlation_table, read_covariance_csv, read_data_csv};
use crate::gaussian::{CovarianceMatrix, SampleSummary};
use crate::graph::{parse_graph, BidirectedGraph, ParsedGraph};

pub(crate) fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn load_any_graph(path: &Path) -> Result<ParsedGraph, CliError> {
    parse_graph(&read_text(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub(crate) fn load_bidirected(path: &Path) -> Result<BidirectedGraph, CliError> {
    BidirectedGraph::parse(&read_text(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Where the sample covariance comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Raw data, rows = variables unless `transpose`.
    Data { path: PathBuf, transpose: bool },
    /// Square covariance CSV.
    Covariance { path: PathBuf, n: usize },
    /// Lower-triangular correlation table with an SD row.
    Correlations { path: PathBuf, n: usize },
}

/// A summary in the vertex order of `graph`, with the digest of the input
/// file.
pub(crate) struct LoadedSample {
    pub summary: SampleSummary,
    pub digest: String,
}

pub(crate) fn load_sample(
    source: &DataSource,
    centered: bool,
    graph: &BidirectedGraph,
) -> Result<LoadedSample, CliError> {
    let (path, summary) = match source {
        DataSource::Data { path, transpose } => {
            let (labels, data) = read_data_csv(&read_text(path)?, *transpose)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            let s = SampleSummary::from_data(labels, &data, centered)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            (path, s)
        }
        DataSource::Covariance { path, n } => {
            let cov = read_covariance_csv(&read_text(path)?)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            (path, summary_from(cov, *n, centered)?)
        }
        DataSource::Correlations { path, n } => {
            let cov = read_correlation_table(&read_text(path)?)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            (path, summary_from(cov, *n, centered)?)
        }
    };
    let summary = summary.reordered(graph.labels()).map_err(|e| {
        CliError::data(format!(
            "{}: variables [{}] do not match graph vertices [{}] ({e})",
            path.display(),
            summary.labels().join(","),
            graph.labels().join(",")
        ))
    })?;
    if let Err(e) = summary.cov().check_pd() {
        return Err(CliError::data(format!(
            "{}: sample covariance {e}",
            path.display()
        )));
    }
    let bytes = fs::read(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    Ok(LoadedSample {
        summary,
        digest: sha256_hex(&bytes),
    })
}

fn summary_from(cov: CovarianceMatrix, n: usize, centered: bool) -> Result<SampleSummary, CliError> {
    SampleSummary::from_covariance(cov, n, centered).map_err(|e| CliError::data(e.to_string()))
}

pub(crate) fn load_start(path: &Path, graph: &BidirectedGraph) -> Result<CovarianceMatrix, CliError> {
    read_covariance_csv(&read_text(path)?)
        .and_then(|c| c.reordered(graph.labels()))
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
