use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix2x4, Vector2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{kalman_update, unscented_measurement_update, KalmanUpdateResult, UnscentedParams};
use crate::numeric::wrap_angle;
use crate::rfs::{StateCov, StateVector};

/// Two-dimensional measurement (position, or bearing/Doppler).
pub type Measurement = Vector2<f64>;

/// Axis-aligned rectangle in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn centered_square(side: f64) -> Self {
        let h = side / 2.0;
        Self { x_min: -h, x_max: h, y_min: -h, y_max: h }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// Position sensor `z = H x + w`, `w ~ N(0, σ² I)`, with uniform Poisson
/// clutter over `region`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSensor {
    pub h: Matrix2x4<f64>,
    pub sigma: f64,
    pub pd: f64,
    pub clutter_rate: f64,
    pub region: Rect,
}

impl LinearSensor {
    pub fn position(sigma: f64, pd: f64, clutter_rate: f64, region: Rect) -> Self {
        Self {
            h: Matrix2x4::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0),
            sigma,
            pd,
            clutter_rate,
            region,
        }
    }
}

/// Bearing and Doppler-shift sensor at a fixed position.
#[derive(Clone, Debug, PartialEq)]
pub struct DopplerSensor {
    pub position: Vector2<f64>,
    pub carrier_hz: f64,
    pub wave_speed: f64,
    /// Bearing noise standard deviation in radians.
    pub sigma_bearing: f64,
    /// Doppler noise standard deviation in Hz.
    pub sigma_doppler: f64,
    pub pd: f64,
    pub clutter_rate: f64,
    pub doppler_min: f64,
    pub doppler_max: f64,
}

impl DopplerSensor {
    /// Noise-free `[bearing, doppler]` of state `x`.
    pub fn observe(&self, x: &StateVector) -> Result<Measurement> {
        let dx = x[0] - self.position[0];
        let dy = x[1] - self.position[1];
        let range = dx.hypot(dy);
        if range == 0.0 {
            return Err(Error::DegenerateGeometry);
        }
        let bearing = wrap_angle(dy.atan2(dx));
        let doppler = 2.0 * self.carrier_hz / self.wave_speed * (dx * x[2] + dy * x[3]) / range;
        Ok(Measurement::new(bearing, doppler))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sensor {
    Linear(LinearSensor),
    Doppler(DopplerSensor),
}

const NO_ANGLES: [usize; 0] = [];
const BEARING: [usize; 1] = [0];

impl Sensor {
    pub fn pd(&self) -> f64 {
        match self {
            Sensor::Linear(s) => s.pd,
            Sensor::Doppler(s) => s.pd,
        }
    }

    /// Detection probability at a state. Both shipped sensor types are
    /// constant over the state space.
    pub fn pd_at(&self, _x: &StateVector) -> f64 {
        self.pd()
    }

    pub fn has_constant_pd(&self) -> bool {
        true
    }

    pub fn clutter_rate(&self) -> f64 {
        match self {
            Sensor::Linear(s) => s.clutter_rate,
            Sensor::Doppler(s) => s.clutter_rate,
        }
    }

    /// Uniform clutter density over the observation domain.
    pub fn clutter_density(&self) -> f64 {
        match self {
            Sensor::Linear(s) => 1.0 / s.region.area(),
            Sensor::Doppler(s) => 1.0 / (2.0 * PI * (s.doppler_max - s.doppler_min)),
        }
    }

    pub fn noise_cov(&self) -> Matrix2<f64> {
        match self {
            Sensor::Linear(s) => Matrix2::identity() * (s.sigma * s.sigma),
            Sensor::Doppler(s) => Matrix2::new(s.sigma_bearing.powi(2), 0.0, 0.0, s.sigma_doppler.powi(2)),
        }
    }

    /// Indices of measurement components that are angles.
    pub fn angular_components(&self) -> &'static [usize] {
        match self {
            Sensor::Linear(_) => &NO_ANGLES,
            Sensor::Doppler(_) => &BEARING,
        }
    }

    /// Noise-free measurement function.
    pub fn observe(&self, x: &StateVector) -> Result<Measurement> {
        match self {
            Sensor::Linear(s) => Ok(s.h * x),
            Sensor::Doppler(s) => s.observe(x),
        }
    }

    /// `ln h(z | x)`; `-inf` when the geometry is degenerate.
    pub fn log_likelihood(&self, z: &Measurement, x: &StateVector) -> f64 {
        let Ok(pred) = self.observe(x) else {
            return f64::NEG_INFINITY;
        };
        let mut d = z - pred;
        for &i in self.angular_components() {
            d[i] = wrap_angle(d[i]);
        }
        // both sensor types have diagonal noise
        let r = self.noise_cov();
        let (v0, v1) = (r[(0, 0)], r[(1, 1)]);
        -0.5 * (d[0] * d[0] / v0 + d[1] * d[1] / v1) - (2.0 * PI).ln() - 0.5 * (v0 * v1).ln()
    }

    /// Measurement update of a Gaussian: exact Kalman for the linear sensor,
    /// unscented for the Doppler sensor.
    pub fn update_gaussian(
        &self,
        mean: &StateVector,
        cov: &StateCov,
        z: &Measurement,
        ut: &UnscentedParams,
    ) -> Result<KalmanUpdateResult<4>> {
        match self {
            Sensor::Linear(s) => kalman_update(mean, cov, &s.h, &self.noise_cov(), z),
            Sensor::Doppler(s) => {
                unscented_measurement_update(mean, cov, |x| s.observe(x), &self.noise_cov(), z, &BEARING, ut)
            }
        }
    }

    /// One noisy detection of `x`.
    pub fn sample_detection<R: Rng + ?Sized>(&self, x: &StateVector, rng: &mut R) -> Result<Measurement> {
        let n0: f64 = rng.sample(StandardNormal);
        let n1: f64 = rng.sample(StandardNormal);
        let mut z = self.observe(x)?;
        match self {
            Sensor::Linear(s) => {
                z[0] += s.sigma * n0;
                z[1] += s.sigma * n1;
            }
            Sensor::Doppler(s) => {
                z[0] = wrap_angle(z[0] + s.sigma_bearing * n0);
                z[1] += s.sigma_doppler * n1;
            }
        }
        Ok(z)
    }

    pub fn sample_clutter<R: Rng + ?Sized>(&self, rng: &mut R) -> Measurement {
        match self {
            Sensor::Linear(s) => Measurement::new(
                rng.random_range(s.region.x_min..=s.region.x_max),
                rng.random_range(s.region.y_min..=s.region.y_max),
            ),
            Sensor::Doppler(s) => {
                let b: f64 = rng.random_range(-PI..PI);
                Measurement::new(wrap_angle(b), rng.random_range(s.doppler_min..=s.doppler_max))
            }
        }
    }

    /// Simulates one scan: Bernoulli(pD) detections of each target plus
    /// Poisson clutter, returned in random order.
    pub fn simulate_scan<R: Rng + ?Sized>(&self, truth: &[StateVector], rng: &mut R) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        for x in truth {
            if rng.random::<f64>() < self.pd() {
                out.push(self.sample_detection(x, rng)?);
            }
        }
        let lambda = self.clutter_rate();
        if lambda > 0.0 {
            let poisson = Poisson::new(lambda).map_err(|e| Error::Config(format!("clutter_rate: {e}")))?;
            let n = poisson.sample(rng) as usize;
            out.extend((0..n).map(|_| self.sample_clutter(rng)));
        }
        out.shuffle(rng);
        Ok(out)
    }
}
