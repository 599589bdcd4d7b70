use nalgebra::Matrix4;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rfs::{StateCov, StateVector};

/// Discrete white-noise-acceleration model on `[x, y, vx, vy]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionModel {
    pub ts: f64,
    pub sigma_v: f64,
    pub ps: f64,
    pub f: StateCov,
    pub q: StateCov,
    q_sqrt: StateCov,
}

impl MotionModel {
    pub fn new(ts: f64, sigma_v: f64, ps: f64) -> Result<Self> {
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(Error::Config(format!("ts: must be positive, got {ts}")));
        }
        if !(sigma_v >= 0.0) || !sigma_v.is_finite() {
            return Err(Error::Config(format!("sigma_v: must be non-negative, got {sigma_v}")));
        }
        if !(0.0..=1.0).contains(&ps) {
            return Err(Error::Config(format!("ps: must be in [0, 1], got {ps}")));
        }
        #[rustfmt::skip]
        let f = Matrix4::new(
            1.0, 0.0, ts, 0.0,
            0.0, 1.0, 0.0, ts,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        let (a, b, c) = (ts.powi(3) / 3.0, ts.powi(2) / 2.0, ts);
        #[rustfmt::skip]
        let q = Matrix4::new(
            a, 0.0, b, 0.0,
            0.0, a, 0.0, b,
            b, 0.0, c, 0.0,
            0.0, b, 0.0, c,
        ) * (sigma_v * sigma_v);
        let q_sqrt = if sigma_v > 0.0 {
            q.cholesky().ok_or(Error::InvalidCovariance)?.l()
        } else {
            StateCov::zeros()
        };
        Ok(Self { ts, sigma_v, ps, f, q, q_sqrt })
    }

    /// Noiseless transition `F x`.
    pub fn propagate(&self, x: &StateVector) -> StateVector {
        self.f * x
    }

    /// `F x + v`, `v ~ N(0, Q)`.
    pub fn predict_state<R: Rng + ?Sized>(&self, x: &StateVector, rng: &mut R) -> StateVector {
        if self.sigma_v == 0.0 {
            return self.propagate(x);
        }
        let n = StateVector::from_fn(|_, _| rng.sample(StandardNormal));
        self.f * x + self.q_sqrt * n
    }

    /// Gaussian moment propagation `(F m, F P Fᵀ + Q)`.
    pub fn predict_gaussian(&self, mean: &StateVector, cov: &StateCov) -> (StateVector, StateCov) {
        let p = self.f * cov * self.f.transpose() + self.q;
        (self.f * mean, (p + p.transpose()) * 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_constant_velocity() {
        let m = MotionModel::new(1.0, 0.0, 0.99).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = m.predict_state(&StateVector::new(0.0, 0.0, 10.0, 0.0), &mut rng);
        assert_eq!(x, StateVector::new(10.0, 0.0, 10.0, 0.0));
    }

    #[test]
    fn two_steps_equal_matrix_square() {
        let m = MotionModel::new(2.5, 0.0, 1.0).unwrap();
        let x = StateVector::new(3.0, -1.0, 2.0, 0.5);
        let f2 = m.f * m.f;
        assert!((m.propagate(&m.propagate(&x)) - f2 * x).amax() < 1e-12);
        // F^2 of the constant-velocity block is the same model with 2 Ts.
        let m2 = MotionModel::new(5.0, 0.0, 1.0).unwrap();
        assert!((m2.f - f2).amax() < 1e-12);
    }

    #[test]
    fn sampled_noise_matches_q() {
        let m = MotionModel::new(1.0, 1.0, 0.99).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let draws: Vec<StateVector> = (0..n).map(|_| m.predict_state(&StateVector::zeros(), &mut rng)).collect();
        let mean = draws.iter().fold(StateVector::zeros(), |a, d| a + d) / n as f64;
        for i in 0..4 {
            let se = (m.q[(i, i)] / n as f64).sqrt();
            assert!(mean[i].abs() < 3.0 * se, "mean[{i}] = {}", mean[i]);
        }
        let cov = draws.iter().fold(StateCov::zeros(), |a, d| a + (d - mean) * (d - mean).transpose()) / (n as f64 - 1.0);
        // Sample covariance entries: standard error of order sqrt(2/n) * scale.
        let expected = Matrix4::new(
            1.0 / 3.0, 0.0, 0.5, 0.0,
            0.0, 1.0 / 3.0, 0.0, 0.5,
            0.5, 0.0, 1.0, 0.0,
            0.0, 0.5, 0.0, 1.0,
        );
        assert!((cov - expected).amax() < 0.02, "{cov}");
    }

    #[test]
    fn rejects_bad_survival() {
        assert!(MotionModel::new(1.0, 1.0, 1.2).is_err());
        assert!(MotionModel::new(0.0, 1.0, 0.9).is_err());
    }
}
