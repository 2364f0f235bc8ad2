//! Maximum-likelihood estimation in Gaussian covariance graph models.
//!
//! A covariance graph model over a bi-directed graph `G = (V, E)` is the set of
//! centred multivariate normal distributions whose covariance matrix has an
//! exact zero at every pair of non-adjacent vertices. This crate provides
//!
//! * [`graph`]: bi-directed graphs and DAGs, m-/d-separation, latent
//!   projection and the Markov-equivalence predicates;
//! * [`gaussian`]: covariance matrices, sample summaries, the log-likelihood,
//!   its score and the likelihood-equation residual;
//! * [`icf`]: iterative conditional fitting, which cycles through
//!   pseudo-variable regressions and never leaves the positive-definite cone;
//! * [`anderson`]: Anderson's linear-system iteration, kept for comparison
//!   together with diagnostics for its failure modes;
//! * [`random`]: seeded random instances for benchmarking;
//! * [`cli`]: the `covfit` command-line front end.
//!
//! The fitting routines consume only the empirical covariance matrix and the
//! sample size; raw data is reduced to a [`gaussian::SampleSummary`] on input.

pub mod anderson;
pub mod cli;
mod error;
pub mod gaussian;
pub mod graph;
pub mod icf;
pub(crate) mod linalg;
pub mod random;

pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, SampleSummary};
pub use graph::{BidirectedGraph, Dag, SeparationQuery};
