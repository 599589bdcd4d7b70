//! Scenario configuration documents (TOML).
//!
//! A scenario file has top-level kinematic settings plus `[[tracks]]`,
//! `[[sensors]]`, `[birth]` and `[filter]` sections. Unknown keys are
//! rejected. See `configs/` at the repository root for complete examples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::member::FilterParams;
use crate::models::sensor::Rect;
use crate::tcphd::TcphdParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_scans: usize,
    pub ts: f64,
    pub sigma_v: f64,
    pub ps: f64,
    /// Draw ground-truth tracks with process noise instead of the pure
    /// transition recursion.
    #[serde(default)]
    pub truth_process_noise: bool,
    pub domain: Rect,
    #[serde(default)]
    pub tracks: Vec<TrackConfig>,
    pub sensors: Vec<SensorConfig>,
    pub birth: BirthConfig,
    pub filter: FilterConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    /// First scan at which the target exists.
    pub birth: usize,
    /// Last scan at which the target exists.
    pub death: usize,
    /// State `[x, y, vx, vy]` at the birth scan.
    pub initial: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SensorConfig {
    Linear {
        pd: f64,
        clutter_rate: f64,
        sigma: f64,
    },
    Doppler {
        pd: f64,
        clutter_rate: f64,
        position: [f64; 2],
        carrier_hz: f64,
        wave_speed: f64,
        sigma_bearing_deg: f64,
        sigma_doppler_hz: f64,
        doppler_min: f64,
        doppler_max: f64,
    },
}

impl SensorConfig {
    pub fn pd(&self) -> f64 {
        match self {
            SensorConfig::Linear { pd, .. } | SensorConfig::Doppler { pd, .. } => *pd,
        }
    }

    pub fn set_pd(&mut self, value: f64) {
        match self {
            SensorConfig::Linear { pd, .. } | SensorConfig::Doppler { pd, .. } => *pd = value,
        }
    }

    pub fn clutter_rate(&self) -> f64 {
        match self {
            SensorConfig::Linear { clutter_rate, .. } | SensorConfig::Doppler { clutter_rate, .. } => *clutter_rate,
        }
    }

    pub fn set_clutter_rate(&mut self, value: f64) {
        match self {
            SensorConfig::Linear { clutter_rate, .. } | SensorConfig::Doppler { clutter_rate, .. } => {
                *clutter_rate = value
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirthConfig {
    pub r: f64,
    pub cov_diag: [f64; 4],
    pub means: Vec<[f64; 4]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implementation {
    /// Gaussian mixtures; Kalman for linear sensors, unscented for Doppler.
    Gaussian,
    /// Weighted particle sets.
    Particle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClutterModel {
    Poisson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub w_max: usize,
    pub p_max: usize,
    pub r_prune: f64,
    pub cap_per_target: usize,
    #[serde(default = "default_clutter_model")]
    pub clutter_model: ClutterModel,
    pub implementation: Implementation,
    #[serde(default = "default_particles")]
    pub particles: usize,
    #[serde(default = "default_tcphd_prune")]
    pub tcphd_prune: f64,
    #[serde(default = "default_tcphd_cap")]
    pub tcphd_cap_per_target: usize,
    #[serde(default = "default_tcphd_merge")]
    pub tcphd_merge: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_clutter_model() -> ClutterModel {
    ClutterModel::Poisson
}
fn default_particles() -> usize {
    700
}
fn default_tcphd_prune() -> f64 {
    1e-3
}
fn default_tcphd_cap() -> usize {
    4
}
fn default_tcphd_merge() -> f64 {
    4.0
}
fn default_n_max() -> usize {
    20
}

impl FilterConfig {
    pub fn member_params(&self) -> FilterParams {
        FilterParams {
            w_max: self.w_max,
            p_max: self.p_max,
            r_prune: self.r_prune,
            cap_per_target: self.cap_per_target,
            particles: match self.implementation {
                Implementation::Gaussian => None,
                Implementation::Particle => Some(self.particles),
            },
            ..FilterParams::default()
        }
    }

    pub fn tcphd_params(&self) -> TcphdParams {
        TcphdParams {
            w_max: self.w_max,
            p_max: self.p_max,
            prune: self.tcphd_prune,
            cap_per_target: self.tcphd_cap_per_target,
            merge_threshold: self.tcphd_merge,
            n_max: self.n_max,
            particles: match self.implementation {
                Implementation::Gaussian => None,
                Implementation::Particle => Some(self.particles),
            },
            ..TcphdParams::default()
        }
    }
}

const CORNERS: [[f64; 4]; 4] = [
    [400.0, 400.0, 0.0, 0.0],
    [-400.0, 400.0, 0.0, 0.0],
    [-400.0, -400.0, 0.0, 0.0],
    [400.0, -400.0, 0.0, 0.0],
];

fn default_tracks() -> Vec<TrackConfig> {
    let t = |birth, death, initial| TrackConfig { birth, death, initial };
    vec![
        t(0, 99, [400.0, 400.0, -5.0, -4.0]),
        t(10, 99, [-400.0, 400.0, 4.0, -5.0]),
        t(20, 79, [-400.0, -400.0, 5.0, 3.0]),
        t(30, 99, [400.0, -400.0, -3.0, 5.0]),
        t(40, 69, [400.0, 400.0, -2.0, -6.0]),
        t(50, 99, [-400.0, -400.0, 6.0, 1.0]),
    ]
}

impl ScenarioConfig {
    /// Linear-Gaussian position sensors: three sensors, `pD = 0.5`,
    /// five clutter points per scan, `σ_w = 10 m`.
    pub fn linear_default() -> Self {
        Self {
            num_scans: 100,
            ts: 1.0,
            sigma_v: 1.0,
            ps: 0.99,
            truth_process_noise: false,
            domain: Rect::centered_square(2000.0),
            tracks: default_tracks(),
            sensors: (0..3)
                .map(|_| SensorConfig::Linear { pd: 0.5, clutter_rate: 5.0, sigma: 10.0 })
                .collect(),
            birth: BirthConfig { r: 0.1, cov_diag: [60.0, 60.0, 25.0, 25.0], means: CORNERS.to_vec() },
            filter: FilterConfig {
                w_max: 4,
                p_max: 4,
                r_prune: 0.05,
                cap_per_target: 4,
                clutter_model: ClutterModel::Poisson,
                implementation: Implementation::Gaussian,
                particles: default_particles(),
                tcphd_prune: default_tcphd_prune(),
                tcphd_cap_per_target: default_tcphd_cap(),
                tcphd_merge: default_tcphd_merge(),
                n_max: default_n_max(),
            },
        }
    }

    /// Five bearing/Doppler sensors in a cross layout (underwater carrier
    /// 300 Hz, sound speed 1450 m/s).
    pub fn nonlinear_default() -> Self {
        let positions = [[-350.0, 0.0], [350.0, 0.0], [0.0, 0.0], [0.0, -350.0], [0.0, 350.0]];
        let mut cfg = Self::linear_default();
        cfg.sensors = positions
            .iter()
            .map(|&position| SensorConfig::Doppler {
                pd: 0.5,
                clutter_rate: 5.0,
                position,
                carrier_hz: 300.0,
                wave_speed: 1450.0,
                sigma_bearing_deg: 1.0,
                sigma_doppler_hz: 0.7,
                doppler_min: -100.0,
                doppler_max: 100.0,
            })
            .collect();
        cfg.birth.cov_diag = [40.0, 40.0, 25.0, 25.0];
        cfg.filter.r_prune = 1e-10;
        cfg.filter.tcphd_prune = 1e-10;
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// Checks value ranges; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        fn bad(field: String, msg: &str) -> Error {
            Error::Config(format!("{field}: {msg}"))
        }
        fn prob(field: String, v: f64) -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(bad(field, &format!("must be in [0, 1], got {v}")))
            }
        }
        fn positive(field: String, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(bad(field, &format!("must be positive, got {v}")))
            }
        }
        fn non_negative(field: String, v: f64) -> Result<()> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(bad(field, &format!("must be non-negative, got {v}")))
            }
        }

        if self.num_scans == 0 {
            return Err(bad("num_scans".into(), "must be at least 1"));
        }
        positive("ts".into(), self.ts)?;
        non_negative("sigma_v".into(), self.sigma_v)?;
        prob("ps".into(), self.ps)?;
        if !(self.domain.x_max > self.domain.x_min && self.domain.y_max > self.domain.y_min) {
            return Err(bad("domain".into(), "must have positive extent"));
        }
        for (i, t) in self.tracks.iter().enumerate() {
            if t.birth > t.death {
                return Err(bad(format!("tracks[{i}].death"), "must not precede birth"));
            }
            if t.death >= self.num_scans {
                return Err(bad(format!("tracks[{i}].death"), "must be less than num_scans"));
            }
            if !t.initial.iter().all(|v| v.is_finite()) {
                return Err(bad(format!("tracks[{i}].initial"), "must be finite"));
            }
        }
        for (i, s) in self.sensors.iter().enumerate() {
            prob(format!("sensors[{i}].pd"), s.pd())?;
            non_negative(format!("sensors[{i}].clutter_rate"), s.clutter_rate())?;
            match s {
                SensorConfig::Linear { sigma, .. } => positive(format!("sensors[{i}].sigma"), *sigma)?,
                SensorConfig::Doppler {
                    carrier_hz,
                    wave_speed,
                    sigma_bearing_deg,
                    sigma_doppler_hz,
                    doppler_min,
                    doppler_max,
                    ..
                } => {
                    positive(format!("sensors[{i}].carrier_hz"), *carrier_hz)?;
                    positive(format!("sensors[{i}].wave_speed"), *wave_speed)?;
                    positive(format!("sensors[{i}].sigma_bearing_deg"), *sigma_bearing_deg)?;
                    positive(format!("sensors[{i}].sigma_doppler_hz"), *sigma_doppler_hz)?;
                    if !(doppler_max > doppler_min) {
                        return Err(bad(format!("sensors[{i}].doppler_max"), "must exceed doppler_min"));
                    }
                }
            }
        }
        prob("birth.r".into(), self.birth.r)?;
        for (k, v) in self.birth.cov_diag.iter().enumerate() {
            positive(format!("birth.cov_diag[{k}]"), *v)?;
        }
        let f = &self.filter;
        if f.w_max == 0 {
            return Err(bad("filter.w_max".into(), "must be at least 1"));
        }
        if f.p_max == 0 {
            return Err(bad("filter.p_max".into(), "must be at least 1"));
        }
        prob("filter.r_prune".into(), f.r_prune)?;
        prob("filter.tcphd_prune".into(), f.tcphd_prune)?;
        if f.cap_per_target == 0 {
            return Err(bad("filter.cap_per_target".into(), "must be at least 1"));
        }
        if f.implementation == Implementation::Particle && f.particles == 0 {
            return Err(bad("filter.particles".into(), "must be at least 1"));
        }
        if !(f.tcphd_merge >= 0.0) {
            return Err(bad("filter.tcphd_merge".into(), "must be non-negative"));
        }
        if f.n_max == 0 {
            return Err(bad("filter.n_max".into(), "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for cfg in [ScenarioConfig::linear_default(), ScenarioConfig::nonlinear_default()] {
            cfg.validate().unwrap();
            let text = cfg.to_toml_string();
            assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn unknown_field_is_rejected_with_its_name() {
        let mut text = ScenarioConfig::linear_default().to_toml_string();
        text = text.replacen("num_scans = 100", "num_scans = 100\nbogus_key = 3", 1);
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("bogus_key"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_sensor_field_is_rejected() {
        let mut text = ScenarioConfig::linear_default().to_toml_string();
        text = text.replacen("sigma = 10.0", "sigma = 10.0\ngain = 2.0", 1);
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("gain"), "{err}");
    }

    #[test]
    fn invalid_value_names_field() {
        let mut cfg = ScenarioConfig::linear_default();
        cfg.sensors[1].set_pd(1.5);
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("sensors[1].pd"), "{err}");

        let mut cfg = ScenarioConfig::linear_default();
        cfg.tracks[0].death = 100;
        assert!(cfg.validate().unwrap_err().to_string().contains("tracks[0].death"));

        let mut cfg = ScenarioConfig::linear_default();
        cfg.filter.w_max = 0;
        assert!(cfg.validate().unwrap_err().to_string().contains("filter.w_max"));
    }
}
