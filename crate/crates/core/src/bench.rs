//! Seeded Monte Carlo benchmark driver and its on-disk artifacts.
//!
//! A run writes into its output directory:
//! - `scans.csv`: `run_id,scan,true_n,est_n,ospa,scan_ms`
//! - `summary.csv`: `filter,s,pD,lambda_c,median,q1,q3,mean_scan_ms`
//! - `cardinality.dat`: `scan true_n mean std`
//! - `ospa_box.dat`: `q1 median q3 min max` of the time-averaged OSPA
//!
//! Results depend only on the configuration and master seed, not on the
//! number of worker threads.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::member::{FilterModels, MsMemberFilter};
use crate::metrics::{ospa, runs_from_records, summarize, OspaParams, RunSummary, ScanRecord, Summary};
use crate::models::{build_scenario, MeasurementSet, Scenario, ScenarioConfig, SensorConfig};
use crate::rfs::StateVector;
use crate::seeding::{stream_rng, Stream};
use crate::tcphd::TcphdFilter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    #[serde(rename = "ms-member")]
    MsMember,
    #[serde(rename = "ms-tcphd")]
    MsTcphd,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::MsMember => "ms-member",
            FilterKind::MsTcphd => "ms-tcphd",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ms-member" => Ok(FilterKind::MsMember),
            "ms-tcphd" => Ok(FilterKind::MsTcphd),
            other => Err(Error::Config(format!("unknown filter '{other}' (expected ms-member or ms-tcphd)"))),
        }
    }
}

/// A filter processing one scan at a time.
pub trait Tracker {
    /// Processes one scan and returns the state estimates and the scan time
    /// in milliseconds.
    fn process(&mut self, measurements: &MeasurementSet, rng: &mut ChaCha8Rng) -> Result<(Vec<StateVector>, f64)>;
}

impl Tracker for MsMemberFilter {
    fn process(&mut self, measurements: &MeasurementSet, rng: &mut ChaCha8Rng) -> Result<(Vec<StateVector>, f64)> {
        let diag = self.step(measurements, rng)?;
        Ok((self.estimates(), diag.elapsed.as_secs_f64() * 1e3))
    }
}

impl Tracker for TcphdFilter {
    fn process(&mut self, measurements: &MeasurementSet, rng: &mut ChaCha8Rng) -> Result<(Vec<StateVector>, f64)> {
        let diag = self.step(measurements, rng)?;
        Ok((self.estimates(), diag.elapsed.as_secs_f64() * 1e3))
    }
}

pub fn make_tracker(scenario: &Scenario, kind: FilterKind) -> Result<Box<dyn Tracker>> {
    let models = FilterModels {
        motion: scenario.motion.clone(),
        sensors: scenario.sensors.clone(),
        birth: scenario.birth.clone(),
    };
    let filter = &scenario.config.filter;
    Ok(match kind {
        FilterKind::MsMember => Box::new(MsMemberFilter::new(models, filter.member_params())?),
        FilterKind::MsTcphd => Box::new(TcphdFilter::new(models, filter.tcphd_params())?),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub filter: FilterKind,
    pub mc_runs: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads for Monte Carlo runs.
    pub jobs: usize,
    /// Record wall-clock scan times. When false `scan_ms` is written as 0
    /// so that artifacts are byte-reproducible.
    pub timing: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mc_runs == 0 {
            return Err(Error::Config("runs: must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs: must be at least 1".into()));
        }
        self.scenario.validate()
    }
}

/// Runs one Monte Carlo replicate and scores it against the ground truth.
pub fn run_single(scenario: &Scenario, kind: FilterKind, master_seed: u64, run: u64, timing: bool) -> Result<RunSummary> {
    let scans = scenario.simulate_run(master_seed, run)?;
    let mut rng = stream_rng(master_seed, run, Stream::Filter);
    let mut tracker = make_tracker(scenario, kind)?;
    let params = OspaParams::default();
    let mut summary = RunSummary { run_id: run, ..Default::default() };
    for meas in &scans {
        let (est, ms) = tracker.process(meas, &mut rng)?;
        let truth = scenario.truth.states_at(meas.scan);
        summary.push(&ScanRecord {
            run_id: run,
            scan: meas.scan,
            true_n: truth.len(),
            est_n: est.len(),
            ospa: ospa(&est, &truth, &params),
            scan_ms: if timing { ms } else { 0.0 },
        });
    }
    Ok(summary)
}

/// One line of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub filter: String,
    pub s: usize,
    #[serde(rename = "pD")]
    pub pd: f64,
    pub lambda_c: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub mean_scan_ms: f64,
}

impl SummaryRow {
    pub fn new(kind: FilterKind, scenario: &ScenarioConfig, summary: &Summary) -> Self {
        let first = scenario.sensors.first();
        Self {
            filter: kind.name().to_string(),
            s: scenario.sensors.len(),
            pd: first.map_or(0.0, SensorConfig::pd),
            lambda_c: first.map_or(0.0, SensorConfig::clutter_rate),
            median: summary.median,
            q1: summary.q1,
            q3: summary.q3,
            mean_scan_ms: summary.mean_scan_ms,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub runs: Vec<RunSummary>,
    pub summary: Summary,
    pub row: SummaryRow,
}

pub const SCANS_CSV: &str = "scans.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const CARDINALITY_DAT: &str = "cardinality.dat";
pub const OSPA_BOX_DAT: &str = "ospa_box.dat";

/// Runs all replicates in memory.
pub fn simulate_benchmark(config: &RunConfig) -> Result<BenchOutcome> {
    config.validate()?;
    let scenario = build_scenario(&config.scenario, config.master_seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("jobs: {e}")))?;
    let runs = pool.install(|| {
        (0..config.mc_runs as u64)
            .into_par_iter()
            .map(|r| run_single(&scenario, config.filter, config.master_seed, r, config.timing))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&runs)?;
    let row = SummaryRow::new(config.filter, &config.scenario, &summary);
    Ok(BenchOutcome { runs, summary, row })
}

/// Runs the benchmark and writes its artifacts. Files written by a failed
/// invocation are removed.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchOutcome> {
    let outcome = simulate_benchmark(config)?;
    let files = [SCANS_CSV, SUMMARY_CSV, CARDINALITY_DAT, OSPA_BOX_DAT].map(|f| config.out_dir.join(f));
    let result = write_outputs(&config.out_dir, &outcome);
    if result.is_err() {
        for f in &files {
            let _ = fs::remove_file(f);
        }
    }
    result.map(|_| outcome)
}

fn write_outputs(dir: &Path, outcome: &BenchOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(SCANS_CSV))?;
    for run in &outcome.runs {
        for rec in run.records() {
            w.serialize(rec)?;
        }
    }
    w.flush()?;
    write_summary_rows(&dir.join(SUMMARY_CSV), std::slice::from_ref(&outcome.row))?;

    let s = &outcome.summary;
    let mut card = fs::File::create(dir.join(CARDINALITY_DAT))?;
    writeln!(card, "# scan true_n mean std")?;
    for k in 0..s.card_mean.len() {
        writeln!(card, "{} {} {} {}", k, s.true_n[k], s.card_mean[k], s.card_std[k])?;
    }
    let mut boxf = fs::File::create(dir.join(OSPA_BOX_DAT))?;
    let min = s.time_averaged.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.time_averaged.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    writeln!(boxf, "# q1 median q3 min max")?;
    writeln!(boxf, "{} {} {} {} {}", s.q1, s.median, s.q3, min, max)?;
    Ok(())
}

pub fn write_summary_rows(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scan_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

pub fn read_summary_rows(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

/// Recomputes the summary from a stored `scans.csv`.
pub fn summary_from_csv(path: &Path) -> Result<Summary> {
    summarize(&runs_from_records(&read_scan_records(path)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Sensors,
    DetectionProbability,
    ClutterRate,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Sensors => "s",
            SweepAxis::DetectionProbability => "pd",
            SweepAxis::ClutterRate => "clutter",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(SweepAxis::Sensors),
            "pd" | "pD" => Ok(SweepAxis::DetectionProbability),
            "clutter" | "lambda" => Ok(SweepAxis::ClutterRate),
            other => Err(Error::Config(format!("unknown sweep axis '{other}' (expected s, pd or clutter)"))),
        }
    }
}

/// Scenario with the swept quantity set to `value`. Sensor-count sweeps
/// replicate the first linear sensor, or take the first `s` configured
/// Doppler sensors.
pub fn apply_sweep(base: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::Sensors => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::Config(format!("s: must be a positive integer, got {value}")));
            }
            let s = value as usize;
            let first = cfg.sensors.first().cloned().ok_or_else(|| Error::Config("sensors: empty".into()))?;
            match first {
                SensorConfig::Linear { .. } => cfg.sensors = vec![first; s],
                SensorConfig::Doppler { .. } => {
                    if s > cfg.sensors.len() {
                        return Err(Error::Config(format!(
                            "s: {s} Doppler sensors requested but only {} positions configured",
                            cfg.sensors.len()
                        )));
                    }
                    cfg.sensors.truncate(s);
                }
            }
        }
        SweepAxis::DetectionProbability => cfg.sensors.iter_mut().for_each(|s| s.set_pd(value)),
        SweepAxis::ClutterRate => cfg.sensors.iter_mut().for_each(|s| s.set_clutter_rate(value)),
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the benchmark once per value, each in its own subdirectory, with
/// the same master seed. Writes `sweep_summary.csv` in the output root.
pub fn sweep(config: &RunConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SummaryRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep: no values given".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let cfg = RunConfig {
            scenario: apply_sweep(&config.scenario, axis, v)?,
            out_dir: config.out_dir.join(format!("{}_{}", axis.name(), v)),
            ..config.clone()
        };
        rows.push(run_benchmark(&cfg)?.row);
    }
    fs::create_dir_all(&config.out_dir)?;
    write_summary_rows(&config.out_dir.join("sweep_summary.csv"), &rows)?;
    Ok(rows)
}
