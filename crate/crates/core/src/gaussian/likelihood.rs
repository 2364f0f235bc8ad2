use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{CovarianceMatrix, SampleSummary, DEFAULT_ZERO_TOL};
use crate::graph::BidirectedGraph;
use crate::{Error, Result};

fn check_dims(sigma: &CovarianceMatrix, summary: &SampleSummary) -> Result<()> {
    if sigma.labels() != summary.labels() {
        return Err(Error::Input(format!(
            "covariance labels [{}] do not match sample labels [{}]",
            sigma.labels().join(","),
            summary.labels().join(",")
        )));
    }
    Ok(())
}

/// `ℓ(Σ) = -(np/2) log 2π - (n/2) log|Σ| - (n/2) tr(Σ⁻¹ S)`, constant included.
pub fn log_likelihood(sigma: &CovarianceMatrix, summary: &SampleSummary) -> Result<f64> {
    check_dims(sigma, summary)?;
    let chol = sigma.cholesky("sigma")?;
    let n = summary.n() as f64;
    let p = sigma.dim() as f64;
    let trace = chol.solve(summary.cov().matrix()).trace();
    Ok(-0.5 * n * p * (2.0 * PI).ln() - 0.5 * n * chol.log_det() - 0.5 * n * trace)
}

/// `Σ⁻¹` and `Σ⁻¹ S Σ⁻¹` for a matrix in the model.
fn likelihood_sides(
    sigma: &CovarianceMatrix,
    summary: &SampleSummary,
    g: &BidirectedGraph,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_dims(sigma, summary)?;
    sigma.check_zero_pattern(g, DEFAULT_ZERO_TOL)?;
    let k = sigma.cholesky("sigma")?.inverse();
    let ksk = &k * summary.cov().matrix() * &k;
    Ok((k, ksk))
}

/// Largest violation of the likelihood equations
/// `(Σ⁻¹)_ij = (Σ⁻¹ S Σ⁻¹)_ij` over the free pairs of `g`.
pub fn likelihood_residual(sigma: &CovarianceMatrix, summary: &SampleSummary, g: &BidirectedGraph) -> Result<f64> {
    let (k, ksk) = likelihood_sides(sigma, summary, g)?;
    Ok(g.free_pairs()
        .into_iter()
        .map(|(i, j)| (k[(i, j)] - ksk[(i, j)]).abs())
        .fold(0.0, f64::max))
}

/// Partial derivatives of the log-likelihood with respect to the free
/// entries of `Σ`, in lexicographic order of `(i, j)`, `i <= j`.
///
/// Off-diagonal entries move as mirrored pairs, so their derivative carries
/// a factor 2 relative to the diagonal formula:
/// `∂ℓ/∂σ_ii = (n/2) W_ii` and `∂ℓ/∂σ_ij = n W_ij` with
/// `W = Σ⁻¹ S Σ⁻¹ - Σ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelScore {
    pairs: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl ModelScore {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i.min(j), i.max(j));
        self.pairs.iter().position(|&pr| pr == key).map(|k| self.values[k])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

pub fn score(sigma: &CovarianceMatrix, summary: &SampleSummary, g: &BidirectedGraph) -> Result<ModelScore> {
    let (k, ksk) = likelihood_sides(sigma, summary, g)?;
    let n = summary.n() as f64;
    let pairs = g.free_pairs();
    let values = pairs
        .iter()
        .map(|&(i, j)| {
            let w = ksk[(i, j)] - k[(i, j)];
            if i == j {
                0.5 * n * w
            } else {
                n * w
            }
        })
        .collect();
    Ok(ModelScore { pairs, values })
}
