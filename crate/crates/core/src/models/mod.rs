//! Target motion, sensor measurement models and scenario generation.

pub mod config;
pub mod motion;
pub mod scenario;
pub mod sensor;

pub use config::{FilterConfig, Implementation, ScenarioConfig, SensorConfig, TrackConfig};
pub use motion::MotionModel;
pub use scenario::{
    build_default_scenario, build_scenario, BirthModel, GroundTruth, MeasurementSet, Scenario, Track,
};
pub use sensor::{DopplerSensor, LinearSensor, Measurement, Rect, Sensor};
