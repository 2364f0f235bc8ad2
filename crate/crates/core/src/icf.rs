//! Iterative conditional fitting.
//!
//! Each step fixes `Σ_{-i,-i}` and maximizes the likelihood over the `i`-th
//! row and column of `Σ`. The zero constraints `σ_ij = 0, j ∈ nsp(i)` turn
//! the regression of `Y_i` on `Y_{-i}` into an unconstrained regression of
//! `Y_i` on the pseudo-variables
//!
//! ```text
//! Z_i = Y_sp(i) - B_{sp(i),nsp(i)} Y_nsp(i),   B_{sp,nsp} = Σ_{sp,nsp} Σ_{nsp,nsp}⁻¹
//! ```
//!
//! whose coefficients determine the non-spouse coefficients through
//! `B_{i,nsp} = -B_{i,sp} B_{sp,nsp}`. All cross-products of `Y_i` and
//! `Z_i` are formed from the empirical covariance, so a step costs the same
//! whatever the sample size.
//!
//! Every step is a partial maximization of the likelihood, so the sequence of
//! log-likelihood values is non-decreasing and every iterate stays in `P(G)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaussian::{likelihood_residual, log_likelihood, CovarianceMatrix, SampleSummary, DEFAULT_ZERO_TOL};
use crate::graph::BidirectedGraph;
use crate::linalg::{self, Cholesky};
use crate::{Error, Result};

/// Starting value of the iteration. All choices lie in `P(G)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    Identity,
    DiagonalOfS,
    User(CovarianceMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepOrder {
    Declaration,
    /// `perm[k]` is the vertex updated at position `k` of each sweep.
    Permutation(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcfOptions {
    pub max_sweeps: usize,
    /// Bound on the largest entry change over one sweep, relative to the
    /// largest absolute entry of `S`.
    pub tol_sigma: f64,
    /// Bound on the likelihood-equation residual.
    pub tol_residual: f64,
    pub start: Start,
    pub sweep_order: SweepOrder,
    /// Additional runs from random starting points in `P(G)`; the result
    /// with the highest log-likelihood is returned.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for IcfOptions {
    fn default() -> Self {
        IcfOptions {
            max_sweeps: 5000,
            tol_sigma: 1e-10,
            tol_residual: 1e-8,
            start: Start::Identity,
            sweep_order: SweepOrder::Declaration,
            restarts: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Converged,
    MaxSweepsReached,
}

impl FitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitStatus::Converged => "converged",
            FitStatus::MaxSweepsReached => "max_sweeps_reached",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub sigma_hat: CovarianceMatrix,
    /// `loglik_trace[r]` is the log-likelihood after `r` sweeps; entry 0
    /// belongs to the starting value.
    pub loglik_trace: Vec<f64>,
    pub sweeps_used: usize,
    pub converged: bool,
    /// Likelihood-equation residual at `sigma_hat`.
    pub residual: f64,
    pub status: FitStatus,
    /// Final log-likelihood of every run when restarts were requested, the
    /// default start first. Empty otherwise.
    pub restart_logliks: Vec<f64>,
}

impl FitResult {
    pub fn loglik(&self) -> f64 {
        *self.loglik_trace.last().expect("trace holds the start")
    }

    /// Whether restarts ended at log-likelihood values further apart than
    /// `tol`, i.e. the likelihood has several local maxima on this instance.
    pub fn multimodal(&self, tol: f64) -> bool {
        let (lo, hi) = self
            .restart_logliks
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        hi - lo > tol
    }
}

/// Cross-products of the pseudo-variables for one vertex, scaled by `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoGram {
    /// `Ẑ_i Ẑ_iᵀ / n`, indexed by `sp(i)`.
    pub gram_z: DMatrix<f64>,
    /// `Y_i Ẑ_iᵀ / n`, indexed by `sp(i)`.
    pub cross_yz: DVector<f64>,
    /// `B_{sp(i),nsp(i)}` from the current `Σ`.
    pub spouse_on_nonspouse: DMatrix<f64>,
}

/// Result of the pseudo-variable regression for one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionEstimate {
    pub vertex: usize,
    pub spouses: Vec<usize>,
    pub nonspouses: Vec<usize>,
    pub spouse_coefficients: DVector<f64>,
    pub nonspouse_coefficients: DVector<f64>,
    /// Conditional variance of `Y_i` given `Y_{-i}`.
    pub lambda: f64,
    pub gram_z: DMatrix<f64>,
    pub cross_yz: DVector<f64>,
}

impl RegressionEstimate {
    /// The full coefficient row `B̂_i` as a length-`p` vector with a zero at
    /// position `i`.
    pub fn coefficients(&self, p: usize) -> DVector<f64> {
        let mut b = DVector::zeros(p);
        for (k, &j) in self.spouses.iter().enumerate() {
            b[j] = self.spouse_coefficients[k];
        }
        for (k, &j) in self.nonspouses.iter().enumerate() {
            b[j] = self.nonspouse_coefficients[k];
        }
        b
    }
}

fn check_vertex(g: &BidirectedGraph, i: usize) -> Result<()> {
    if i >= g.len() {
        return Err(Error::Input(format!("vertex index {i} out of range for {} vertices", g.len())));
    }
    Ok(())
}

fn check_inputs(summary: &SampleSummary, sigma: &CovarianceMatrix, g: &BidirectedGraph) -> Result<()> {
    if summary.labels() != g.labels() {
        return Err(Error::Input(format!(
            "sample labels [{}] do not match graph vertices [{}]",
            summary.labels().join(","),
            g.labels().join(",")
        )));
    }
    sigma.check_zero_pattern(g, DEFAULT_ZERO_TOL)?;
    sigma.cholesky("sigma")?;
    Ok(())
}

fn pseudo_gram_unchecked(
    s: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    i: usize,
    sp: &[usize],
    nsp: &[usize],
) -> Result<PseudoGram> {
    let s_ss = linalg::select(s, sp, sp);
    let s_is = DVector::from_iterator(sp.len(), sp.iter().map(|&j| s[(i, j)]));
    if nsp.is_empty() {
        return Ok(PseudoGram {
            gram_z: s_ss,
            cross_yz: s_is,
            spouse_on_nonspouse: DMatrix::zeros(sp.len(), 0),
        });
    }
    let sigma_nn = linalg::select(sigma, nsp, nsp);
    let chol = Cholesky::new(&sigma_nn).map_err(|pivot| {
        Error::Numerical(format!(
            "non-spouse block of sigma for vertex {i} is not positive definite (pivot {pivot})"
        ))
    })?;
    // Bᵀ = Σ_nn⁻¹ Σ_ns
    let bt = chol.solve(&linalg::select(sigma, nsp, sp));
    let b = bt.transpose();
    let s_ns = linalg::select(s, nsp, sp);
    let s_nn = linalg::select(s, nsp, nsp);
    let b_s_ns = &b * &s_ns;
    let mut gram = &s_ss - &b_s_ns - b_s_ns.transpose() + &b * &s_nn * &bt;
    linalg::symmetrize(&mut gram);
    let s_in = DVector::from_iterator(nsp.len(), nsp.iter().map(|&j| s[(i, j)]));
    let cross = s_is - &b * s_in;
    Ok(PseudoGram {
        gram_z: gram,
        cross_yz: cross,
        spouse_on_nonspouse: b,
    })
}

/// Gram matrix of the pseudo-variables of vertex `i` and their cross-product
/// with `Y_i`, from the current `sigma`. `sp(i)` must be non-empty.
pub fn pseudo_gram(
    summary: &SampleSummary,
    sigma: &CovarianceMatrix,
    g: &BidirectedGraph,
    i: usize,
) -> Result<PseudoGram> {
    check_vertex(g, i)?;
    check_inputs(summary, sigma, g)?;
    let sp = g.spouse_indices(i);
    if sp.is_empty() {
        return Err(Error::Precondition(format!("vertex `{}` has no spouses", g.label(i))));
    }
    pseudo_gram_unchecked(summary.cov().matrix(), sigma.matrix(), i, &sp, &g.nonspouse_indices(i))
}

fn regress_unchecked(
    s: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    g: &BidirectedGraph,
    i: usize,
) -> Result<RegressionEstimate> {
    let sp = g.spouse_indices(i);
    let nsp = g.nonspouse_indices(i);
    if sp.is_empty() {
        return Ok(RegressionEstimate {
            vertex: i,
            spouses: sp,
            nonspouse_coefficients: DVector::zeros(nsp.len()),
            nonspouses: nsp,
            spouse_coefficients: DVector::zeros(0),
            lambda: s[(i, i)],
            gram_z: DMatrix::zeros(0, 0),
            cross_yz: DVector::zeros(0),
        });
    }
    let pg = pseudo_gram_unchecked(s, sigma, i, &sp, &nsp)?;
    let chol = Cholesky::new(&pg.gram_z).map_err(|pivot| {
        Error::Numerical(format!(
            "pseudo-variable Gram matrix of vertex `{}` is not positive definite (pivot {pivot})",
            g.label(i)
        ))
    })?;
    let coef = chol.solve(&DMatrix::from_column_slice(sp.len(), 1, pg.cross_yz.as_slice()));
    let coef = DVector::from_column_slice(coef.as_slice());
    let lambda = s[(i, i)] - pg.cross_yz.dot(&coef);
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Numerical(format!(
            "conditional variance of vertex `{}` is not positive ({lambda:e})",
            g.label(i)
        )));
    }
    let nonspouse = -(pg.spouse_on_nonspouse.transpose() * &coef);
    Ok(RegressionEstimate {
        vertex: i,
        spouses: sp,
        nonspouses: nsp,
        spouse_coefficients: coef,
        nonspouse_coefficients: nonspouse,
        lambda,
        gram_z: pg.gram_z,
        cross_yz: pg.cross_yz,
    })
}

/// The pseudo-variable regression of vertex `i` given the current `sigma`.
pub fn regress(
    summary: &SampleSummary,
    sigma: &CovarianceMatrix,
    g: &BidirectedGraph,
    i: usize,
) -> Result<RegressionEstimate> {
    check_vertex(g, i)?;
    check_inputs(summary, sigma, g)?;
    regress_unchecked(summary.cov().matrix(), sigma.matrix(), g, i)
}

fn apply_regression(sigma: &mut CovarianceMatrix, est: &RegressionEstimate) {
    let i = est.vertex;
    let p = sigma.dim();
    let b = est.coefficients(p);
    let m = sigma.matrix();
    let new_row: Vec<(usize, f64)> = est
        .spouses
        .iter()
        .map(|&j| (j, (0..p).filter(|&k| k != i).map(|k| b[k] * m[(k, j)]).sum::<f64>()))
        .collect();
    let diag = est.lambda + new_row.iter().map(|&(j, v)| b[j] * v).sum::<f64>();
    for &j in &est.nonspouses {
        sigma.set_symmetric(i, j, 0.0);
    }
    for (j, v) in new_row {
        sigma.set_symmetric(i, j, v);
    }
    sigma.set_symmetric(i, i, diag);
}

/// One conditional-fitting step: returns `Σ'` with `Σ'_{-i,-i} = Σ_{-i,-i}`
/// and row/column `i` replaced by the partial maximizer of the likelihood.
/// Entries at non-spouses of `i` are set to exact zeros.
pub fn icf_step(
    summary: &SampleSummary,
    sigma: &CovarianceMatrix,
    g: &BidirectedGraph,
    i: usize,
) -> Result<CovarianceMatrix> {
    let est = regress(summary, sigma, g, i)?;
    let mut next = sigma.clone();
    apply_regression(&mut next, &est);
    Ok(next)
}

/// Passed to the observer of [`fit_with_observer`] after every step.
#[derive(Debug)]
pub struct StepEvent<'a> {
    /// 0 for the run from the configured start, `k` for the `k`-th restart.
    pub run: usize,
    /// 1-based sweep number.
    pub sweep: usize,
    pub vertex: usize,
    pub sigma: &'a CovarianceMatrix,
}

pub fn fit(summary: &SampleSummary, g: &BidirectedGraph, opts: &IcfOptions) -> Result<FitResult> {
    fit_with_observer(summary, g, opts, |_| {})
}

/// [`fit`], calling `observer` with every intermediate iterate.
pub fn fit_with_observer<F>(
    summary: &SampleSummary,
    g: &BidirectedGraph,
    opts: &IcfOptions,
    mut observer: F,
) -> Result<FitResult>
where
    F: FnMut(&StepEvent<'_>),
{
    if summary.labels() != g.labels() {
        return Err(Error::Input(format!(
            "sample labels [{}] do not match graph vertices [{}]",
            summary.labels().join(","),
            g.labels().join(",")
        )));
    }
    if let Err(pivot) = Cholesky::new(summary.cov().matrix()) {
        return Err(Error::Input(format!(
            "sample covariance matrix is not positive definite (factorization failed at pivot {pivot})"
        )));
    }
    let order = match &opts.sweep_order {
        SweepOrder::Declaration => (0..g.len()).collect::<Vec<_>>(),
        SweepOrder::Permutation(perm) => {
            let mut seen = vec![false; g.len()];
            if perm.len() != g.len() || perm.iter().any(|&k| k >= g.len() || std::mem::replace(&mut seen[k], true)) {
                return Err(Error::Input("sweep order is not a permutation of the vertices".into()));
            }
            perm.clone()
        }
    };
    let start = match &opts.start {
        Start::Identity => CovarianceMatrix::identity(g.labels().iter().cloned())?,
        Start::DiagonalOfS => summary.cov().diagonal(),
        Start::User(s) => {
            s.check_labels(g)?;
            s.check_zero_pattern(g, 0.0)?;
            s.check_pd()?;
            s.clone()
        }
    };

    let mut best = run(summary, g, opts, &order, start, 0, &mut observer)?;
    if opts.restarts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut logliks = vec![best.loglik()];
        for r in 1..=opts.restarts {
            let start = random_start(summary, g, &mut rng);
            let res = run(summary, g, opts, &order, start, r, &mut observer)?;
            logliks.push(res.loglik());
            if res.loglik() > best.loglik() {
                best = res;
            }
        }
        best.restart_logliks = logliks;
    }
    Ok(best)
}

fn run<F>(
    summary: &SampleSummary,
    g: &BidirectedGraph,
    opts: &IcfOptions,
    order: &[usize],
    start: CovarianceMatrix,
    run_index: usize,
    observer: &mut F,
) -> Result<FitResult>
where
    F: FnMut(&StepEvent<'_>),
{
    let s = summary.cov().matrix();
    let scale = linalg::max_abs(s);
    let mut sigma = start;
    let mut trace = vec![log_likelihood(&sigma, summary)?];
    let mut status = FitStatus::MaxSweepsReached;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let before = sigma.matrix().clone();
        for &i in order {
            let est = regress_unchecked(s, sigma.matrix(), g, i)?;
            apply_regression(&mut sigma, &est);
            observer(&StepEvent {
                run: run_index,
                sweep: sweeps,
                vertex: i,
                sigma: &sigma,
            });
        }
        let l = log_likelihood(&sigma, summary)?;
        trace.push(l);
        let change = linalg::max_abs_diff(&before, sigma.matrix());
        log::trace!("run {run_index} sweep {sweeps}: loglik {l:.12e}, max change {change:.3e}");
        if change <= opts.tol_sigma * scale
            && likelihood_residual(&sigma, summary, g)? <= opts.tol_residual
        {
            status = FitStatus::Converged;
            break;
        }
    }
    let residual = likelihood_residual(&sigma, summary, g)?;
    log::info!(
        "icf run {run_index}: {} after {sweeps} sweeps, loglik {:.12e}, residual {residual:.3e}",
        status.as_str(),
        trace.last().unwrap()
    );
    Ok(FitResult {
        sigma_hat: sigma,
        loglik_trace: trace,
        sweeps_used: sweeps,
        converged: status == FitStatus::Converged,
        residual,
        status,
        restart_logliks: Vec::new(),
    })
}

/// A random point of `P(G)` on the scale of `S`: variances are `S_ii` times
/// a factor in `[0.5, 2]`, correlations on edges are uniform in
/// `(-0.9, 0.9)`, and off-diagonal entries are halved until the matrix is
/// positive definite.
pub fn random_start<R: Rng>(summary: &SampleSummary, g: &BidirectedGraph, rng: &mut R) -> CovarianceMatrix {
    let p = g.len();
    let sd: Vec<f64> = (0..p)
        .map(|i| (summary.cov().get(i, i) * rng.random_range(0.5..2.0)).sqrt())
        .collect();
    let mut m = DMatrix::from_fn(p, p, |i, j| if i == j { sd[i] * sd[i] } else { 0.0 });
    for (i, j) in g.edges() {
        let v = rng.random_range(-0.9..0.9) * sd[i] * sd[j];
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    loop {
        if Cholesky::new(&m).is_ok() {
            return CovarianceMatrix::from_parts_unchecked(g.labels().to_vec(), m);
        }
        for i in 0..p {
            for j in 0..p {
                if i != j {
                    m[(i, j)] *= 0.5;
                }
            }
        }
    }
}
