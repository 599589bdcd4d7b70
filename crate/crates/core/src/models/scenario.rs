use nalgebra::Vector2;
use rand::Rng;

use crate::error::Result;
use crate::models::config::{ScenarioConfig, SensorConfig, TrackConfig};
use crate::models::motion::MotionModel;
use crate::models::sensor::{DopplerSensor, LinearSensor, Measurement, Sensor};
use crate::rfs::{Bernoulli, Density, MultiBernoulli, StateCov, StateVector};
use crate::seeding::{stream_rng, Stream};

/// One ground-truth trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub birth_scan: usize,
    pub death_scan: usize,
    /// State at scans `birth_scan..=death_scan`.
    pub states: Vec<StateVector>,
}

impl Track {
    pub fn state_at(&self, scan: usize) -> Option<&StateVector> {
        if scan < self.birth_scan || scan > self.death_scan {
            return None;
        }
        self.states.get(scan - self.birth_scan)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub tracks: Vec<Track>,
    pub num_scans: usize,
}

impl GroundTruth {
    /// Propagates each track from its initial state. With `noise = None`
    /// the pure transition recursion is used.
    pub fn generate<R: Rng + ?Sized>(
        tracks: &[TrackConfig],
        motion: &MotionModel,
        num_scans: usize,
        mut noise: Option<&mut R>,
    ) -> Self {
        let tracks = tracks
            .iter()
            .map(|t| {
                let mut x = StateVector::from(t.initial);
                let mut states = Vec::with_capacity(t.death - t.birth + 1);
                states.push(x);
                for _ in t.birth..t.death {
                    x = match noise.as_deref_mut() {
                        Some(rng) => motion.predict_state(&x, rng),
                        None => motion.propagate(&x),
                    };
                    states.push(x);
                }
                Track { birth_scan: t.birth, death_scan: t.death, states }
            })
            .collect();
        Self { tracks, num_scans }
    }

    pub fn states_at(&self, scan: usize) -> Vec<StateVector> {
        self.tracks.iter().filter_map(|t| t.state_at(scan).copied()).collect()
    }

    pub fn cardinality(&self, scan: usize) -> usize {
        self.tracks.iter().filter(|t| t.state_at(scan).is_some()).count()
    }

    /// Scans at which the true cardinality changes (births, and the scan
    /// after each death).
    pub fn event_scans(&self) -> Vec<usize> {
        let mut ev: Vec<usize> = self
            .tracks
            .iter()
            .flat_map(|t| [t.birth_scan, t.death_scan + 1])
            .filter(|&s| s < self.num_scans)
            .collect();
        ev.sort_unstable();
        ev.dedup();
        ev
    }
}

/// Birth Bernoulli components appended at every prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct BirthModel {
    pub components: Vec<Bernoulli>,
}

impl BirthModel {
    pub fn gaussian(r: f64, means: &[[f64; 4]], cov_diag: [f64; 4]) -> Result<Self> {
        let cov = StateCov::from_diagonal(&StateVector::from(cov_diag));
        let components = means
            .iter()
            .map(|m| Bernoulli::new(r, Density::gaussian(StateVector::from(*m), cov)?))
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn as_multi_bernoulli(&self) -> MultiBernoulli {
        MultiBernoulli::new(self.components.clone())
    }
}

/// Measurements of all sensors at one scan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementSet {
    pub scan: usize,
    pub per_sensor: Vec<Vec<Measurement>>,
}

impl MeasurementSet {
    pub fn empty(scan: usize, sensors: usize) -> Self {
        Self { scan, per_sensor: vec![Vec::new(); sensors] }
    }

    pub fn num_sensors(&self) -> usize {
        self.per_sensor.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.per_sensor.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.per_sensor.iter().map(Vec::len).sum()
    }
}

/// Everything needed to simulate and filter one scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub truth: GroundTruth,
    pub motion: MotionModel,
    pub sensors: Vec<Sensor>,
    pub birth: BirthModel,
}

pub fn build_sensor(cfg: &SensorConfig, domain: crate::models::sensor::Rect) -> Sensor {
    match *cfg {
        SensorConfig::Linear { pd, clutter_rate, sigma } => {
            Sensor::Linear(LinearSensor::position(sigma, pd, clutter_rate, domain))
        }
        SensorConfig::Doppler {
            pd,
            clutter_rate,
            position,
            carrier_hz,
            wave_speed,
            sigma_bearing_deg,
            sigma_doppler_hz,
            doppler_min,
            doppler_max,
        } => Sensor::Doppler(DopplerSensor {
            position: Vector2::from(position),
            carrier_hz,
            wave_speed,
            sigma_bearing: sigma_bearing_deg.to_radians(),
            sigma_doppler: sigma_doppler_hz,
            pd,
            clutter_rate,
            doppler_min,
            doppler_max,
        }),
    }
}

/// Builds models and ground truth from a validated configuration. When the
/// configuration asks for noisy truth, the trajectories are drawn from the
/// truth stream of `master_seed`, shared by all runs.
pub fn build_scenario(config: &ScenarioConfig, master_seed: u64) -> Result<Scenario> {
    config.validate()?;
    let motion = MotionModel::new(config.ts, config.sigma_v, config.ps)?;
    let truth = if config.truth_process_noise {
        let mut rng = stream_rng(master_seed, 0, Stream::Truth);
        GroundTruth::generate(&config.tracks, &motion, config.num_scans, Some(&mut rng))
    } else {
        GroundTruth::generate::<rand_chacha::ChaCha8Rng>(&config.tracks, &motion, config.num_scans, None)
    };
    let sensors = config.sensors.iter().map(|s| build_sensor(s, config.domain)).collect();
    let birth = BirthModel::gaussian(config.birth.r, &config.birth.means, config.birth.cov_diag)?;
    Ok(Scenario { config: config.clone(), truth, motion, sensors, birth })
}

/// Default scenario for the given configuration.
pub fn build_default_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    build_scenario(config, 0)
}

impl Scenario {
    /// Measurements of all scans for Monte Carlo run `run`. Each sensor
    /// draws from its own stream of `(master_seed, run)`.
    pub fn simulate_run(&self, master_seed: u64, run: u64) -> Result<Vec<MeasurementSet>> {
        let mut rngs: Vec<_> = (0..self.sensors.len())
            .map(|i| stream_rng(master_seed, run, Stream::Sensor(i)))
            .collect();
        (0..self.truth.num_scans)
            .map(|scan| {
                let states = self.truth.states_at(scan);
                let per_sensor = self
                    .sensors
                    .iter()
                    .zip(rngs.iter_mut())
                    .map(|(s, rng)| s.simulate_scan(&states, rng))
                    .collect::<Result<_>>()?;
                Ok(MeasurementSet { scan, per_sensor })
            })
            .collect()
    }
}
