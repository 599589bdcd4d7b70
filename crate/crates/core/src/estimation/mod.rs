//! Numerical estimation machinery: Kalman conditioning, the unscented
//! transform for nonlinear sensors, and particle reweighting/resampling.

pub mod kalman;
pub mod particle;
pub mod unscented;

pub use kalman::{kalman_update, KalmanUpdateResult};
pub use particle::{particle_reweight, particle_reweight_log, resample, systematic_indices};
pub use unscented::{sigma_points, unscented_measurement_update, UnscentedParams};
