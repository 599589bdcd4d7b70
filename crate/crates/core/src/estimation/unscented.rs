use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::estimation::kalman::KalmanUpdateResult;
use crate::numeric::{log_gaussian, wrap_angle};

/// Scaling parameters of the unscented transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnscentedParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UnscentedParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 2.0, kappa: 0.0 }
    }
}

impl UnscentedParams {
    pub fn lambda(&self, dim: usize) -> f64 {
        self.alpha * self.alpha * (dim as f64 + self.kappa) - dim as f64
    }

    /// Mean and covariance weights of the `2d + 1` sigma points.
    pub fn weights(&self, dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let lambda = self.lambda(dim);
        let scale = dim as f64 + lambda;
        if scale.abs() < 1e-12 || !scale.is_finite() {
            return Err(Error::InvalidUnscentedParams(scale));
        }
        let mut wm = vec![1.0 / (2.0 * scale); 2 * dim + 1];
        let mut wc = wm.clone();
        wm[0] = lambda / scale;
        wc[0] = lambda / scale + (1.0 - self.alpha * self.alpha + self.beta);
        Ok((wm, wc))
    }
}

/// Residual `a - b` with the listed components wrapped to `(-π, π]`.
fn residual<const M: usize>(a: &SVector<f64, M>, b: &SVector<f64, M>, angular: &[usize]) -> SVector<f64, M> {
    let mut d = a - b;
    for &i in angular {
        d[i] = wrap_angle(d[i]);
    }
    d
}

/// Sigma points `m`, `m ± sqrt(d + λ) L_i` for `P = L Lᵀ`.
pub fn sigma_points<const D: usize>(
    mean: &SVector<f64, D>,
    cov: &SMatrix<f64, D, D>,
    params: &UnscentedParams,
) -> Result<Vec<SVector<f64, D>>> {
    let scale = D as f64 + params.lambda(D);
    if !(scale > 0.0) {
        return Err(Error::InvalidUnscentedParams(scale));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let l = match sym.cholesky() {
        Some(c) => c.l(),
        None => {
            let jitter = 1e-9 * sym.trace().abs().max(f64::MIN_POSITIVE);
            (sym + SMatrix::<f64, D, D>::identity() * jitter)
                .cholesky()
                .ok_or(Error::InvalidCovariance)?
                .l()
        }
    } * scale.sqrt();
    let mut pts = Vec::with_capacity(2 * D + 1);
    pts.push(*mean);
    for i in 0..D {
        pts.push(mean + l.column(i));
    }
    for i in 0..D {
        pts.push(mean - l.column(i));
    }
    Ok(pts)
}

/// Unscented measurement update of `N(mean, cov)` with `z = h(x) + w`.
/// Components listed in `angular` are treated as angles: their predicted
/// mean, spreads and the innovation are all wrapped.
pub fn unscented_measurement_update<const D: usize, const M: usize, F>(
    mean: &SVector<f64, D>,
    cov: &SMatrix<f64, D, D>,
    h: F,
    r: &SMatrix<f64, M, M>,
    z: &SVector<f64, M>,
    angular: &[usize],
    params: &UnscentedParams,
) -> Result<KalmanUpdateResult<D>>
where
    F: Fn(&SVector<f64, D>) -> Result<SVector<f64, M>>,
{
    let (wm, wc) = params.weights(D)?;
    let xs = sigma_points(mean, cov, params)?;
    let ys = xs.iter().map(&h).collect::<Result<Vec<_>>>()?;

    // Angular means are accumulated as wrapped offsets from the centre point.
    let anchor = ys[0];
    let mut y_mean = anchor;
    for (w, y) in wm.iter().zip(&ys) {
        y_mean += residual(y, &anchor, angular) * *w;
    }
    for &i in angular {
        y_mean[i] = wrap_angle(y_mean[i]);
    }

    let mut s = *r;
    let mut cross = SMatrix::<f64, D, M>::zeros();
    for ((w, x), y) in wc.iter().zip(&xs).zip(&ys) {
        let dy = residual(y, &y_mean, angular);
        let dx = x - mean;
        s += dy * dy.transpose() * *w;
        cross += dx * dy.transpose() * *w;
    }
    let s = (s + s.transpose()) * 0.5;
    let chol = s.cholesky().ok_or(Error::SingularInnovation)?;
    let gain = chol.solve(&cross.transpose()).transpose();
    let innovation = residual(z, &y_mean, angular);
    let post_mean = mean + gain * innovation;
    let post_cov = cov - gain * s * gain.transpose();
    let post_cov = (post_cov + post_cov.transpose()) * 0.5;
    let log_marginal = log_gaussian(&innovation, &s)?;
    Ok(KalmanUpdateResult { mean: post_mean, cov: post_cov, log_marginal })
}
