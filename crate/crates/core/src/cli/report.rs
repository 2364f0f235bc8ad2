//! Fit reports and benchmark records.
//!
//! Machine output is JSON with a fixed key order (struct field order) and
//! every real number rounded to 12 significant digits, so identical inputs
//! give byte-identical documents. Wall time appears only in the human output.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::anderson::AndersonFit;
use crate::gaussian::CovarianceMatrix;
use crate::icf::FitResult;

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn rounded_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().map(|&v| sig12(v)).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Icf,
    Anderson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub graph_sha256: String,
    pub data_sha256: String,
    pub n: usize,
    pub p: usize,
    pub centered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub algorithm: Algorithm,
    pub status: String,
    pub converged: bool,
    pub iterations: usize,
    pub loglik: f64,
    pub residual: f64,
    pub labels: Vec<String>,
    pub sigma: Vec<Vec<f64>>,
    /// Derived from `sigma`.
    pub correlations: Vec<Vec<f64>>,
    /// Derived from `sigma`.
    pub sds: Vec<f64>,
    pub input: InputDigest,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl FitReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        algorithm: Algorithm,
        status: &str,
        converged: bool,
        iterations: usize,
        loglik: f64,
        residual: f64,
        sigma: &CovarianceMatrix,
        input: InputDigest,
        wall_time: Duration,
    ) -> Self {
        FitReport {
            algorithm,
            status: status.to_string(),
            converged,
            iterations,
            loglik: sig12(loglik),
            residual: sig12(residual),
            labels: sigma.labels().to_vec(),
            sigma: rounded_rows(sigma.matrix()),
            correlations: rounded_rows(&sigma.correlations()),
            sds: sigma.sds().into_iter().map(sig12).collect(),
            input,
            wall_time,
        }
    }

    pub fn from_icf(res: &FitResult, input: InputDigest, wall_time: Duration) -> Self {
        FitReport::new(
            Algorithm::Icf,
            res.status.as_str(),
            res.converged,
            res.sweeps_used,
            res.loglik(),
            res.residual,
            &res.sigma_hat,
            input,
            wall_time,
        )
    }

    pub fn from_anderson(res: &AndersonFit, input: InputDigest, wall_time: Duration) -> Self {
        FitReport::new(
            Algorithm::Anderson,
            res.status.as_str(),
            res.converged(),
            res.iterations,
            res.loglik,
            res.residual,
            &res.sigma_hat,
            input,
            wall_time,
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Correlations in the lower triangle with an SD row underneath.
    pub fn to_table(&self) -> String {
        let width = self.labels.iter().map(String::len).max().unwrap_or(0).max(9) + 1;
        let mut out = String::new();
        let algo = match self.algorithm {
            Algorithm::Icf => "icf",
            Algorithm::Anderson => "anderson",
        };
        let _ = writeln!(out, "algorithm   {algo}");
        let _ = writeln!(out, "status      {} after {} iterations", self.status, self.iterations);
        let _ = writeln!(out, "loglik      {:.6}", self.loglik);
        let _ = writeln!(out, "residual    {:.3e}", self.residual);
        let _ = writeln!(out, "n, p        {}, {}", self.input.n, self.input.p);
        let _ = writeln!(out, "time        {:.3} ms", self.wall_time.as_secs_f64() * 1e3);
        let _ = writeln!(out);
        let _ = write!(out, "{:<w$}", "", w = width);
        for l in &self.labels {
            let _ = write!(out, "{l:>width$}");
        }
        let _ = writeln!(out);
        for (i, l) in self.labels.iter().enumerate() {
            let _ = write!(out, "{l:<width$}");
            for j in 0..i {
                let _ = write!(out, "{:>width$.3}", self.correlations[i][j]);
            }
            let _ = writeln!(out);
        }
        let _ = write!(out, "{:<width$}", "SD");
        for sd in &self.sds {
            let _ = write!(out, "{:>width$}", format_sd(*sd));
        }
        let _ = writeln!(out);
        out
    }
}

/// Three significant digits, as in published SD rows.
fn format_sd(sd: f64) -> String {
    if sd == 0.0 || !sd.is_finite() {
        return format!("{sd}");
    }
    let decimals = (2 - sd.abs().log10().floor() as i32).max(0) as usize;
    format!("{sd:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmOutcome {
    pub status: String,
    pub converged: bool,
    pub loglik: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    /// `None` for file input.
    pub seed: Option<u64>,
    pub p: usize,
    pub edges: usize,
    pub icf: AlgorithmOutcome,
    /// Whether the ICF log-likelihood trace never decreased (up to 1e-10
    /// relative).
    pub icf_monotone: bool,
    pub anderson: AlgorithmOutcome,
    /// Entrywise agreement within 1e-6; `None` unless both converged.
    pub agree: Option<bool>,
}

impl BenchRecord {
    pub fn new(seed: Option<u64>, p: usize, edges: usize, icf: &FitResult, anderson: &AndersonFit) -> Self {
        let agree = (icf.converged && anderson.converged()).then(|| {
            icf.sigma_hat
                .matrix()
                .iter()
                .zip(anderson.sigma_hat.matrix().iter())
                .all(|(a, b)| (a - b).abs() <= 1e-6)
        });
        let icf_monotone = icf
            .loglik_trace
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-10 * w[0].abs());
        BenchRecord {
            seed,
            p,
            edges,
            icf: AlgorithmOutcome {
                status: icf.status.as_str().to_string(),
                converged: icf.converged,
                loglik: sig12(icf.loglik()),
                iterations: icf.sweeps_used,
                residual: sig12(icf.residual),
            },
            icf_monotone,
            anderson: AlgorithmOutcome {
                status: anderson.status.as_str().to_string(),
                converged: anderson.converged(),
                loglik: sig12(anderson.loglik),
                iterations: anderson.iterations,
                residual: sig12(anderson.residual),
            },
            agree,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AndersonFailures {
    pub max_iters_reached: usize,
    pub non_pd_iterate: usize,
    pub singular_system: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub icf_converged: usize,
    pub icf_monotone: usize,
    pub anderson_converged: usize,
    pub both_converged: usize,
    /// Fraction of instances with both converged that agree; `None` when
    /// there are none.
    pub agreement_rate: Option<f64>,
    pub anderson_failures: AndersonFailures,
}

impl BenchSummary {
    pub fn from_records(records: &[BenchRecord]) -> Self {
        let mut failures = AndersonFailures::default();
        for r in records {
            match r.anderson.status.as_str() {
                "max_iters_reached" => failures.max_iters_reached += 1,
                "non_pd_iterate" => failures.non_pd_iterate += 1,
                "singular_system" => failures.singular_system += 1,
                _ => {}
            }
        }
        let both = records.iter().filter(|r| r.agree.is_some()).count();
        let agreeing = records.iter().filter(|r| r.agree == Some(true)).count();
        BenchSummary {
            instances: records.len(),
            icf_converged: records.iter().filter(|r| r.icf.converged).count(),
            icf_monotone: records.iter().filter(|r| r.icf_monotone).count(),
            anderson_converged: records.iter().filter(|r| r.anderson.converged).count(),
            both_converged: both,
            agreement_rate: (both > 0).then(|| sig12(agreeing as f64 / both as f64)),
            anderson_failures: failures,
        }
    }
}
