//! Seeded random covariance-graph instances.
//!
//! An instance is a graph, a true covariance matrix and the empirical
//! covariance of `n` draws from it. Everything is a pure function of the
//! seed and the [`InstanceConfig`].
//!
//! * Graph: Erdős–Rényi on `p` vertices labelled `v1..vp` with edge
//!   probability `edge_prob`.
//! * Truth ([`Truth::Model`]): the Gram matrix `A Aᵀ / 2p` of a standard
//!   normal `p × 2p` matrix, projected onto `P(G)` by fitting the graph
//!   model to it; if that fails, non-edges are zeroed and the diagonal is
//!   boosted until positive definite. [`Truth::Dense`] keeps the Gram
//!   matrix, so the graph is misspecified.
//! * Sample: `n` draws of `N(0, Σ)`, summarised with the mean estimated.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::gaussian::{CovarianceMatrix, SampleSummary};
use crate::graph::{BidirectedGraph, Vertices};
use crate::icf::{self, IcfOptions, Start};
use crate::linalg::Cholesky;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truth {
    /// The true covariance lies in the model.
    #[default]
    Model,
    /// A dense covariance; the fitted graph is misspecified.
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceConfig {
    pub p: usize,
    pub edge_prob: f64,
    pub n: usize,
    pub truth: Truth,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            p: 5,
            edge_prob: 0.5,
            n: 50,
            truth: Truth::Model,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomInstance {
    pub seed: u64,
    pub graph: BidirectedGraph,
    pub truth: CovarianceMatrix,
    pub summary: SampleSummary,
}

/// The Gram matrix is formed from a `p × 2p` normal matrix; square
/// matrices give condition numbers in the thousands.
const GRAM_COLUMNS_PER_VARIABLE: usize = 2;

fn labels(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("v{i}")).collect()
}

pub fn random_graph<R: Rng>(p: usize, edge_prob: f64, rng: &mut R) -> BidirectedGraph {
    let vertices = Vertices::new(labels(p)).expect("distinct labels");
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random_bool(edge_prob.clamp(0.0, 1.0)) {
                edges.push((i, j));
            }
        }
    }
    BidirectedGraph::from_index_edges(vertices, edges).expect("valid edges")
}

fn gram<R: Rng>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let k = GRAM_COLUMNS_PER_VARIABLE * p;
    let a = DMatrix::<f64>::from_fn(p, k, |_, _| rng.sample(StandardNormal));
    let mut w = &a * a.transpose() / k as f64;
    crate::linalg::symmetrize(&mut w);
    w
}

/// A positive-definite matrix with the zero pattern of `g`.
pub fn random_model_covariance<R: Rng>(g: &BidirectedGraph, rng: &mut R) -> CovarianceMatrix {
    let p = g.len();
    let w = gram(p, rng);
    let projected = CovarianceMatrix::new(g.labels().to_vec(), w.clone())
        .and_then(|c| SampleSummary::from_covariance(c, p, true))
        .and_then(|s| {
            let opts = IcfOptions {
                max_sweeps: 200,
                tol_sigma: 1e-8,
                tol_residual: f64::INFINITY,
                start: Start::DiagonalOfS,
                ..Default::default()
            };
            icf::fit(&s, g, &opts)
        });
    match projected {
        Ok(res) => res.sigma_hat,
        Err(_) => boosted(g, w),
    }
}

fn boosted(g: &BidirectedGraph, mut w: DMatrix<f64>) -> CovarianceMatrix {
    for (i, j) in g.pairwise_independences() {
        w[(i, j)] = 0.0;
        w[(j, i)] = 0.0;
    }
    let mut boost = 1e-3 * w.diagonal().max().max(1e-3);
    while Cholesky::new(&w).is_err() {
        for i in 0..w.nrows() {
            w[(i, i)] += boost;
        }
        boost *= 2.0;
    }
    CovarianceMatrix::new(g.labels().to_vec(), w).expect("symmetric")
}

/// Empirical covariance (mean estimated) of `n` draws from `N(0, truth)`.
pub fn sample_summary<R: Rng>(truth: &CovarianceMatrix, n: usize, rng: &mut R) -> Result<SampleSummary> {
    let p = truth.dim();
    let l = truth.cholesky("true covariance")?.l().clone();
    let z = DMatrix::<f64>::from_fn(p, n, |_, _| rng.sample(StandardNormal));
    SampleSummary::from_data(truth.labels().to_vec(), &(l * z), false)
}

pub fn generate(seed: u64, cfg: &InstanceConfig) -> Result<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_graph(cfg.p, cfg.edge_prob, &mut rng);
    let truth = match cfg.truth {
        Truth::Model => random_model_covariance(&graph, &mut rng),
        Truth::Dense => CovarianceMatrix::new(graph.labels().to_vec(), gram(cfg.p, &mut rng))?,
    };
    let summary = sample_summary(&truth, cfg.n, &mut rng)?;
    Ok(RandomInstance {
        seed,
        graph,
        truth,
        summary,
    })
}
