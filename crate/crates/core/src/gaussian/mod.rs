//! Covariance matrices, sample summaries and the Gaussian likelihood of a
//! covariance graph model.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::graph::BidirectedGraph;
use crate::linalg::{self, Cholesky};
use crate::{Error, Result};

pub mod io;
mod likelihood;

pub use likelihood::{likelihood_residual, log_likelihood, score, ModelScore};

/// Default absolute tolerance for entries that must be zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Symmetric `p × p` matrix with vertex labels.
///
/// Symmetry is exact: the constructor rejects matrices whose two triangles
/// differ by more than round-off and stores the averaged matrix. Positive
/// definiteness is not required at construction (Anderson iterates may leave
/// the cone) and is checked on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    labels: Vec<String>,
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, m: DMatrix<f64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let p = labels.len();
        if m.nrows() != p || m.ncols() != p {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for {p} labels",
                m.nrows(),
                m.ncols()
            )));
        }
        crate::graph::Vertices::new(labels.iter().cloned())?;
        if let Some((i, j)) = (0..p)
            .flat_map(|i| (0..p).map(move |j| (i, j)))
            .find(|&(i, j)| !m[(i, j)].is_finite())
        {
            return Err(Error::Input(format!("non-finite entry at ({},{})", labels[i], labels[j])));
        }
        let scale = linalg::max_abs(&m).max(f64::MIN_POSITIVE);
        for i in 0..p {
            for j in i + 1..p {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Input(format!(
                        "matrix is not symmetric at ({},{}): {} vs {}",
                        labels[i],
                        labels[j],
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        let mut m = m;
        linalg::symmetrize(&mut m);
        Ok(CovarianceMatrix { labels, m })
    }

    pub fn identity<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let p = labels.len();
        CovarianceMatrix::new(labels, DMatrix::identity(p, p))
    }

    /// The matrix with all off-diagonal entries set to zero.
    pub fn diagonal(&self) -> CovarianceMatrix {
        CovarianceMatrix {
            labels: self.labels.clone(),
            m: DMatrix::from_diagonal(&self.m.diagonal()),
        }
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<String>, m: DMatrix<f64>) -> Self {
        CovarianceMatrix { labels, m }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub(crate) fn set_symmetric(&mut self, i: usize, j: usize, v: f64) {
        self.m[(i, j)] = v;
        self.m[(j, i)] = v;
    }

    pub(crate) fn cholesky(&self, what: &str) -> Result<Cholesky> {
        Cholesky::new(&self.m).map_err(|pivot| Error::NotPositiveDefinite {
            what: what.to_string(),
            pivot,
        })
    }

    /// Verifies positive definiteness by a Cholesky factorization.
    pub fn check_pd(&self) -> Result<()> {
        self.cholesky("matrix").map(|_| ())
    }

    pub fn is_pd(&self) -> bool {
        Cholesky::new(&self.m).is_ok()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky("matrix")?.inverse())
    }

    pub fn log_det(&self) -> Result<f64> {
        Ok(self.cholesky("matrix")?.log_det())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.m.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Standard deviations `sqrt(σ_ii)`.
    pub fn sds(&self) -> Vec<f64> {
        self.m.diagonal().iter().map(|v| v.sqrt()).collect()
    }

    /// Correlation matrix `σ_ij / sqrt(σ_ii σ_jj)`.
    pub fn correlations(&self) -> DMatrix<f64> {
        let sd = self.sds();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                1.0
            } else {
                self.m[(i, j)] / (sd[i] * sd[j])
            }
        })
    }

    /// Rows and columns rearranged to follow `labels`, which must be a
    /// permutation of the current labels.
    pub fn reordered<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::Input(format!(
                "label sets differ: matrix has {} variables, expected {}",
                self.dim(),
                labels.len()
            )));
        }
        let idx = labels
            .iter()
            .map(|l| {
                self.labels
                    .iter()
                    .position(|x| x == l.as_ref())
                    .ok_or_else(|| Error::Input(format!("variable `{}` missing from the data", l.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CovarianceMatrix {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            m: linalg::select(&self.m, &idx, &idx),
        })
    }

    pub(crate) fn check_labels(&self, g: &BidirectedGraph) -> Result<()> {
        if self.labels.as_slice() != g.labels() {
            return Err(Error::Input(format!(
                "matrix labels [{}] do not match graph vertices [{}]",
                self.labels.join(","),
                g.labels().join(",")
            )));
        }
        Ok(())
    }

    /// Fails with the offending entries if any non-adjacent pair exceeds
    /// `tol` in absolute value.
    pub fn check_zero_pattern(&self, g: &BidirectedGraph, tol: f64) -> Result<()> {
        self.check_labels(g)?;
        let offending: Vec<_> = g
            .pairwise_independences()
            .into_iter()
            .filter(|&(i, j)| self.m[(i, j)].abs() > tol)
            .map(|(i, j)| (self.labels[i].clone(), self.labels[j].clone(), self.m[(i, j)]))
            .collect();
        if offending.is_empty() {
            Ok(())
        } else {
            Err(Error::ModelMembership { offending })
        }
    }
}

/// Whether `sigma` lies in `P(G)`: positive definite, and `|σ_ij| <= tol`
/// for every non-adjacent pair.
pub fn in_model(sigma: &CovarianceMatrix, g: &BidirectedGraph, tol: f64) -> Result<bool> {
    sigma.check_labels(g)?;
    let zeros = g
        .pairwise_independences()
        .into_iter()
        .all(|(i, j)| sigma.get(i, j).abs() <= tol);
    Ok(zeros && sigma.is_pd())
}

/// Reconstructs a covariance matrix from marginal correlations and standard
/// deviations. `correlations[k]` holds the strict lower-triangular row of
/// variable `k + 1`, i.e. `k + 1` values.
pub fn from_correlation_table<S: Into<String>>(
    labels: impl IntoIterator<Item = S>,
    correlations: &[Vec<f64>],
    sds: &[f64],
) -> Result<CovarianceMatrix> {
    let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
    let p = labels.len();
    if sds.len() != p {
        return Err(Error::Input(format!("{} standard deviations for {p} variables", sds.len())));
    }
    if correlations.len() != p.saturating_sub(1) {
        return Err(Error::Input(format!(
            "{} correlation rows for {p} variables (expected {})",
            correlations.len(),
            p.saturating_sub(1)
        )));
    }
    if let Some(k) = sds.iter().position(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Input(format!(
            "standard deviation of `{}` must be positive, got {}",
            labels[k], sds[k]
        )));
    }
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p, sds.iter().map(|s| s * s)));
    for (k, row) in correlations.iter().enumerate() {
        let i = k + 1;
        if row.len() != i {
            return Err(Error::Input(format!(
                "correlation row for `{}` has {} entries, expected {i}",
                labels[i],
                row.len()
            )));
        }
        for (j, &r) in row.iter().enumerate() {
            if r.is_nan() || r.abs() > 1.0 {
                return Err(Error::Input(format!(
                    "correlation ({},{}) = {r} outside [-1, 1]",
                    labels[i], labels[j]
                )));
            }
            let v = r * sds[i] * sds[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let cov = CovarianceMatrix::new(labels, m)?;
    if !cov.is_pd() {
        return Err(Error::ModelData {
            what: "reconstructed covariance matrix".into(),
            min_eigenvalue: cov.min_eigenvalue(),
        });
    }
    Ok(cov)
}

/// Empirical covariance together with the sample size it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    cov: CovarianceMatrix,
    n: usize,
    centered: bool,
}

impl SampleSummary {
    /// Wraps an existing covariance matrix. With `centered` the mean is taken
    /// as known to be zero and `n >= p` is required; otherwise the matrix is
    /// taken to be mean-corrected and `n >= p + 1` is required.
    pub fn from_covariance(cov: CovarianceMatrix, n: usize, centered: bool) -> Result<Self> {
        let p = cov.dim();
        let needed = if centered { p } else { p + 1 };
        if n < needed {
            return Err(Error::Dimension(format!(
                "sample size n = {n} is too small for p = {p} variables (need n >= {needed}{})",
                if centered { "" } else { " when the mean is estimated" }
            )));
        }
        Ok(SampleSummary { cov, n, centered })
    }

    /// Empirical covariance of a `p × n` data matrix (one row per variable,
    /// one column per subject). With `centered` this is `(1/n) Σ y yᵀ`;
    /// otherwise deviations from the row means are used.
    pub fn from_data<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        data: &DMatrix<f64>,
        centered: bool,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let (p, n) = data.shape();
        if labels.len() != p {
            return Err(Error::Dimension(format!("{} labels for {p} data rows", labels.len())));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite value for `{}` (subject {})",
                labels[k % p],
                k / p + 1
            )));
        }
        let needed = if centered { p } else { p + 1 };
        if n < needed {
            return Err(Error::Dimension(format!(
                "n = {n} subjects is too small for p = {p} variables (need n >= {needed})"
            )));
        }
        let centred_data = if centered {
            data.clone()
        } else {
            let means = data.column_mean();
            let mut d = data.clone();
            for mut col in d.column_iter_mut() {
                col -= &means;
            }
            d
        };
        let mut s = &centred_data * centred_data.transpose() / n as f64;
        linalg::symmetrize(&mut s);
        let cov = CovarianceMatrix::from_parts_unchecked(labels, s);
        SampleSummary::from_covariance(cov, n, centered)
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn dim(&self) -> usize {
        self.cov.dim()
    }

    pub fn labels(&self) -> &[String] {
        self.cov.labels()
    }

    /// The same summary with variables rearranged to follow `labels`.
    pub fn reordered<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(SampleSummary {
            cov: self.cov.reordered(labels)?,
            n: self.n,
            centered: self.centered,
        })
    }
}
