//! Gaussian density estimation, the shallow one-class classifier.
//!
//! A `GdeModel` fits a mean and a shrinkage-regularized full covariance to
//! a set of rows and scores queries by negative log-density (up to the
//! constant term): higher score means more anomalous. The same model is
//! used inside the data-refinement ensemble and as the final scorer.

use serde::{Deserialize, Serialize};

use crate::error::{Result, StocError};
use crate::matrix::Matrix;

/// Shrinkage ladder tried by [`GdeModel::fit_auto`].
pub const AUTO_SHRINKAGE: [f64; 3] = [1e-3, 1e-2, 1e-1];

/// Covariance used when every input row is identical.
const DEGENERATE_VARIANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdeModel {
    mean: Vec<f64>,
    /// Lower-triangular Cholesky factor of the regularized covariance,
    /// row-major d*d with zeros above the diagonal.
    factor: Vec<f64>,
    log_det: f64,
    dims: usize,
}

impl GdeModel {
    /// Fit mean and regularized covariance on the given rows.
    ///
    /// The covariance is `(1 - shrinkage) * S + shrinkage * (tr(S)/d) * I`
    /// with `S` the population (divide-by-n) sample covariance. Requires
    /// `shrinkage > 0` whenever `n <= d`, since `S` is singular there.
    pub fn fit(features: &Matrix, shrinkage: f64) -> Result<Self> {
        let n = features.rows();
        let d = features.cols();
        if n < 2 {
            return Err(StocError::TooFewRows { rows: n, needed: 2 });
        }
        if d == 0 {
            return Err(StocError::invalid("features", "zero-width feature matrix"));
        }
        if !(0.0..=1.0).contains(&shrinkage) {
            return Err(StocError::invalid("shrinkage", "must lie in [0, 1]"));
        }
        if shrinkage == 0.0 && n <= d {
            return Err(StocError::invalid(
                "shrinkage",
                format!("must be positive when n ({n}) <= d ({d})"),
            ));
        }
        if !features.all_finite() {
            return Err(StocError::NonFinite {
                context: "gde_fit input".to_string(),
            });
        }

        let mut mean = vec![0.0; d];
        for row in features.iter_rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }

        let mut cov = vec![0.0; d * d];
        let mut centered = vec![0.0; d];
        for row in features.iter_rows() {
            for ((c, &v), &m) in centered.iter_mut().zip(row).zip(&mean) {
                *c = v - m;
            }
            for i in 0..d {
                let ci = centered[i];
                for j in 0..=i {
                    cov[i * d + j] += ci * centered[j];
                }
            }
        }
        for v in &mut cov {
            *v /= n as f64;
        }

        let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
        if trace <= 0.0 {
            // All rows identical: no spread to shrink toward.
            cov.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..d {
                cov[i * d + i] = DEGENERATE_VARIANCE;
            }
        } else if shrinkage > 0.0 {
            let target = shrinkage * trace / d as f64;
            for i in 0..d {
                for j in 0..=i {
                    cov[i * d + j] *= 1.0 - shrinkage;
                }
                cov[i * d + i] += target;
            }
        }

        let factor = cholesky(&cov, d).ok_or(StocError::Factorization { shrinkage })?;
        let log_det = 2.0 * (0..d).map(|i| factor[i * d + i].ln()).sum::<f64>();
        Ok(GdeModel {
            mean,
            factor,
            log_det,
            dims: d,
        })
    }

    /// Fit with the default shrinkage, escalating along [`AUTO_SHRINKAGE`]
    /// until the factorization succeeds.
    pub fn fit_auto(features: &Matrix) -> Result<Self> {
        let mut last = StocError::Factorization {
            shrinkage: *AUTO_SHRINKAGE.last().unwrap(),
        };
        for &lambda in &AUTO_SHRINKAGE {
            match Self::fit(features, lambda) {
                Ok(model) => return Ok(model),
                Err(err @ StocError::Factorization { .. }) => last = err,
                Err(other) => return Err(other),
            }
        }
        Err(last)
    }

    /// Anomaly score: `0.5 * (x - mean)' Sigma^-1 (x - mean) + 0.5 * log det Sigma`.
    ///
    /// The `(d/2) log 2pi` constant is dropped; every threshold in this
    /// crate is percentile-based, so additive constants cancel.
    ///
    /// Panics on dimension mismatch or non-finite input.
    pub fn score(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dims, "gde_score: dimension mismatch");
        let d = self.dims;
        // Forward-substitute L v = (x - mean); the quadratic form is |v|^2.
        let mut v = vec![0.0; d];
        for i in 0..d {
            debug_assert!(x[i].is_finite(), "gde_score: non-finite input");
            let mut s = x[i] - self.mean[i];
            for (j, &vj) in v.iter().enumerate().take(i) {
                s -= self.factor[i * d + j] * vj;
            }
            v[i] = s / self.factor[i * d + i];
        }
        let quad: f64 = v.iter().map(|a| a * a).sum();
        0.5 * quad + 0.5 * self.log_det
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }
}

/// Lower-triangular Cholesky factor of a symmetric matrix given by its
/// lower triangle, or `None` if the matrix is not positive definite.
fn cholesky(cov: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = cov[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Some(l)
}
