use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::numeric::log_gaussian;

/// Gaussian posterior plus the log marginal likelihood of the measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct KalmanUpdateResult<const D: usize> {
    pub mean: SVector<f64, D>,
    pub cov: SMatrix<f64, D, D>,
    /// `ln N(z; H m, H P Hᵀ + R)`
    pub log_marginal: f64,
}

/// Linear-Gaussian conditioning of `N(mean, cov)` on `z = H x + w`,
/// `w ~ N(0, R)`. Covariance uses the Joseph form.
pub fn kalman_update<const D: usize, const M: usize>(
    mean: &SVector<f64, D>,
    cov: &SMatrix<f64, D, D>,
    h: &SMatrix<f64, M, D>,
    r: &SMatrix<f64, M, M>,
    z: &SVector<f64, M>,
) -> Result<KalmanUpdateResult<D>> {
    let innovation = z - h * mean;
    let pht = cov * h.transpose();
    let s = h * pht + r;
    let s = (s + s.transpose()) * 0.5;
    let chol = s.cholesky().ok_or(Error::SingularInnovation)?;
    // K = P Hᵀ S⁻¹
    let gain = chol.solve(&pht.transpose()).transpose();
    let post_mean = mean + gain * innovation;
    let i_kh = SMatrix::<f64, D, D>::identity() - gain * h;
    let post_cov = i_kh * cov * i_kh.transpose() + gain * r * gain.transpose();
    let post_cov = (post_cov + post_cov.transpose()) * 0.5;
    let log_marginal = log_gaussian(&innovation, &s)?;
    Ok(KalmanUpdateResult { mean: post_mean, cov: post_cov, log_marginal })
}
