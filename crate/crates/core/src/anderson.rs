//! Anderson's algorithm for the likelihood equations of a covariance graph
//! model.
//!
//! Each iteration solves the linear system `A_Σ σ = b_Σ` for the vector of
//! free entries, where with `σ^{ij} = (Σ⁻¹)_ij`
//!
//! ```text
//! A_(ij,kk) = σ^{ik} σ^{jk}                    k ∈ V
//! A_(ij,kl) = σ^{ik} σ^{jl} + σ^{jk} σ^{il}    k <-> l
//! b_ij      = (Σ⁻¹ S Σ⁻¹)_ij
//! ```
//!
//! Fixed points solve the likelihood equations, but nothing keeps the iterates
//! positive definite and the likelihood may decrease. Failures are reported
//! as statuses, never as errors.

use nalgebra::{DMatrix, DVector};

use crate::gaussian::{likelihood_residual, log_likelihood, CovarianceMatrix, SampleSummary, DEFAULT_ZERO_TOL};
use crate::graph::BidirectedGraph;
use crate::linalg;
use crate::{Error, Result};

/// Free pairs in the column order used by [`AndersonSystem`]: diagonals in
/// vertex order, then edges `(i, j)`, `i < j`, lexicographically.
pub fn free_index(g: &BidirectedGraph) -> Vec<(usize, usize)> {
    (0..g.len()).map(|i| (i, i)).chain(g.edges()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonSystem {
    pub index_set: Vec<(usize, usize)>,
    pub a_matrix: DMatrix<f64>,
    pub b_vector: DVector<f64>,
}

impl AndersonSystem {
    /// Largest asymmetry of `D A`, where `D` doubles the rows of edges.
    ///
    /// `A` itself is not symmetric: an edge column counts both `(k, l)` and
    /// `(l, k)`, so `A_(kk,ij) = 2 A_(ij,kk)`. Weighting the edge rows by two
    /// restores symmetry whenever `Σ` is symmetric.
    pub fn asymmetry(&self) -> f64 {
        let mut weighted = self.a_matrix.clone();
        for (u, &(i, j)) in self.index_set.iter().enumerate() {
            if i != j {
                weighted.row_mut(u).scale_mut(2.0);
            }
        }
        linalg::max_abs_diff(&weighted, &weighted.transpose())
    }

    /// `A σ - b` for the free entries of `sigma`.
    pub fn defect(&self, sigma: &CovarianceMatrix) -> DVector<f64> {
        let v = DVector::from_iterator(
            self.index_set.len(),
            self.index_set.iter().map(|&(i, j)| sigma.get(i, j)),
        );
        &self.a_matrix * v - &self.b_vector
    }
}

fn check_inputs(sigma: &CovarianceMatrix, summary: &SampleSummary, g: &BidirectedGraph) -> Result<()> {
    if summary.labels() != g.labels() {
        return Err(Error::Input(format!(
            "sample labels [{}] do not match graph vertices [{}]",
            summary.labels().join(","),
            g.labels().join(",")
        )));
    }
    sigma.check_zero_pattern(g, DEFAULT_ZERO_TOL)
}

pub fn build_system(sigma: &CovarianceMatrix, summary: &SampleSummary, g: &BidirectedGraph) -> Result<AndersonSystem> {
    check_inputs(sigma, summary, g)?;
    let k = sigma.cholesky("sigma")?.inverse();
    Ok(build_from_inverse(&k, summary.cov().matrix(), g))
}

fn build_from_inverse(k: &DMatrix<f64>, s: &DMatrix<f64>, g: &BidirectedGraph) -> AndersonSystem {
    let index_set = free_index(g);
    let f = index_set.len();
    let a_matrix = DMatrix::from_fn(f, f, |row, col| {
        let (i, j) = index_set[row];
        let (kk, l) = index_set[col];
        if kk == l {
            k[(i, kk)] * k[(j, kk)]
        } else {
            k[(i, kk)] * k[(j, l)] + k[(j, kk)] * k[(i, l)]
        }
    });
    let ksk = k * s * k;
    let b_vector = DVector::from_iterator(f, index_set.iter().map(|&(i, j)| ksk[(i, j)]));
    AndersonSystem {
        index_set,
        a_matrix,
        b_vector,
    }
}

/// Solution of one update, embedded into a symmetric matrix with zeros at
/// non-edges. Not necessarily positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct AndersonUpdate {
    pub sigma_next: CovarianceMatrix,
    pub pd: bool,
}

fn solve_system(sys: &AndersonSystem) -> Result<DVector<f64>> {
    let f = sys.index_set.len();
    let lu = sys.a_matrix.clone().lu();
    let u = lu.u();
    let (lo, hi) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    let threshold = 1e3 * f64::EPSILON * f as f64;
    if ratio.is_nan() || ratio <= threshold {
        return Err(Error::Numerical(format!(
            "Anderson system is singular to working precision (pivot ratio {ratio:.3e} <= {threshold:.3e})"
        )));
    }
    lu.solve(&sys.b_vector)
        .ok_or_else(|| Error::Numerical("Anderson system is singular".into()))
}

fn embed(labels: &[String], p: usize, index_set: &[(usize, usize)], values: &DVector<f64>) -> CovarianceMatrix {
    let mut m = DMatrix::zeros(p, p);
    for (&(i, j), &v) in index_set.iter().zip(values.iter()) {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    CovarianceMatrix::from_parts_unchecked(labels.to_vec(), m)
}

/// One Anderson update `A_Σ σ' = b_Σ`.
pub fn anderson_step(sigma: &CovarianceMatrix, summary: &SampleSummary, g: &BidirectedGraph) -> Result<AndersonUpdate> {
    let sys = build_system(sigma, summary, g)?;
    let values = solve_system(&sys)?;
    let sigma_next = embed(g.labels(), g.len(), &sys.index_set, &values);
    let pd = sigma_next.is_pd();
    Ok(AndersonUpdate { sigma_next, pd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AndersonStatus {
    Converged,
    MaxItersReached,
    NonPdIterate,
    SingularSystem,
}

impl AndersonStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AndersonStatus::Converged => "converged",
            AndersonStatus::MaxItersReached => "max_iters_reached",
            AndersonStatus::NonPdIterate => "non_pd_iterate",
            AndersonStatus::SingularSystem => "singular_system",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Free entries in [`free_index`] order.
    pub sigma: Vec<f64>,
    pub pd: bool,
    /// Present only for positive-definite iterates.
    pub loglik: Option<f64>,
    /// Largest absolute change of a free entry.
    pub step_norm: f64,
}

/// Iterates in chronological order; the first record is `Σ^(1)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AndersonTrace {
    pub records: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndersonOptions {
    pub max_iters: usize,
    /// Bound on the step norm, relative to the largest absolute entry of `S`.
    pub tol: f64,
}

impl Default for AndersonOptions {
    fn default() -> Self {
        AndersonOptions {
            max_iters: 5000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonFit {
    /// The last positive-definite iterate (the identity start if none).
    pub sigma_hat: CovarianceMatrix,
    pub status: AndersonStatus,
    pub iterations: usize,
    pub loglik: f64,
    /// Likelihood-equation residual at `sigma_hat`.
    pub residual: f64,
    pub trace: AndersonTrace,
}

impl AndersonFit {
    pub fn converged(&self) -> bool {
        self.status == AndersonStatus::Converged
    }
}

/// Runs Anderson's algorithm from the identity matrix.
pub fn fit_anderson(summary: &SampleSummary, g: &BidirectedGraph, opts: &AndersonOptions) -> Result<AndersonFit> {
    let identity = CovarianceMatrix::identity(g.labels().iter().cloned())?;
    check_inputs(&identity, summary, g)?;
    let s = summary.cov().matrix();
    let scale = linalg::max_abs(s);
    let index_set = free_index(g);
    let free = |m: &CovarianceMatrix| -> Vec<f64> { index_set.iter().map(|&(i, j)| m.get(i, j)).collect() };

    let mut current = identity;
    let mut inverse = DMatrix::identity(g.len(), g.len());
    let mut trace = AndersonTrace::default();
    let mut status = AndersonStatus::MaxItersReached;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let sys = build_from_inverse(&inverse, s, g);
        let values = match solve_system(&sys) {
            Ok(v) => v,
            Err(_) => {
                status = AndersonStatus::SingularSystem;
                break;
            }
        };
        let next = embed(g.labels(), g.len(), &index_set, &values);
        let step_norm = free(&next)
            .iter()
            .zip(free(&current))
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        let chol = next.cholesky("iterate").ok();
        let loglik = match chol {
            Some(_) => Some(log_likelihood(&next, summary)?),
            None => None,
        };
        trace.records.push(IterationRecord {
            sigma: free(&next),
            pd: chol.is_some(),
            loglik,
            step_norm,
        });
        log::trace!("anderson iteration {iterations}: pd {}, step {step_norm:.3e}", chol.is_some());
        let Some(chol) = chol else {
            status = AndersonStatus::NonPdIterate;
            break;
        };
        inverse = chol.inverse();
        current = next;
        if step_norm <= opts.tol * scale {
            status = AndersonStatus::Converged;
            break;
        }
    }
    let loglik = log_likelihood(&current, summary)?;
    let residual = likelihood_residual(&current, summary, g)?;
    log::info!(
        "anderson: {} after {iterations} iterations, loglik {loglik:.12e}, residual {residual:.3e}",
        status.as_str()
    );
    Ok(AndersonFit {
        sigma_hat: current,
        status,
        iterations,
        loglik,
        residual,
        trace,
    })
}
