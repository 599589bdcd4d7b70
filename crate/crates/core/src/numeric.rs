//! Small numerical helpers shared across the crate.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};

/// `ln(Σ exp(x_i))` that tolerates `-inf` entries. Returns `-inf` for an
/// empty slice or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Normalizes log-weights in place into linear weights summing to one.
/// Returns the log normalizer.
pub fn normalize_log_weights(log_w: &[f64]) -> Result<(Vec<f64>, f64)> {
    let lse = log_sum_exp(log_w);
    if !lse.is_finite() {
        return Err(Error::DegenerateWeights(lse.exp()));
    }
    Ok((log_w.iter().map(|v| (v - lse).exp()).collect(), lse))
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut w = (a + PI).rem_euclid(two_pi) - PI;
    if w <= -PI {
        w += two_pi;
    }
    w
}

/// Symmetrizes and checks a covariance by Cholesky factorization. On failure
/// a single jitter of `1e-9 * trace * I` is added before trying again.
pub fn checked_covariance<const D: usize>(cov: &SMatrix<f64, D, D>) -> Result<SMatrix<f64, D, D>> {
    let sym = (cov + cov.transpose()) * 0.5;
    if !sym.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidCovariance);
    }
    if sym.cholesky().is_some() {
        return Ok(sym);
    }
    let trace = sym.trace().abs().max(f64::MIN_POSITIVE);
    let jittered = sym + SMatrix::<f64, D, D>::identity() * (1e-9 * trace);
    if jittered.cholesky().is_some() {
        return Ok(jittered);
    }
    // PSD but singular (zero rows) is still a valid covariance.
    let eig = nalgebra::DMatrix::from_column_slice(D, D, sym.as_slice()).symmetric_eigen();
    let floor = -1e-9 * trace;
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return Ok(sym);
    }
    Err(Error::InvalidCovariance)
}

/// Log density of a zero-mean Gaussian with covariance `cov` at `x`.
pub fn log_gaussian<const M: usize>(x: &SVector<f64, M>, cov: &SMatrix<f64, M, M>) -> Result<f64> {
    let chol = cov.cholesky().ok_or(Error::SingularInnovation)?;
    let l = chol.l();
    let log_det: f64 = 2.0 * (0..M).map(|i| l[(i, i)].ln()).sum::<f64>();
    let y = l.solve_lower_triangular(x).ok_or(Error::SingularInnovation)?;
    let maha = y.norm_squared();
    Ok(-0.5 * (M as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + maha))
}
