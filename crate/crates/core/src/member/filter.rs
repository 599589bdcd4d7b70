use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimation::UnscentedParams;
use crate::models::{BirthModel, MeasurementSet, MotionModel, Sensor};
use crate::rfs::{MultiBernoulli, StateVector};

use super::greedy::{greedy_partitions, QuasiPartition};
use super::scoring::{Lead, ScanContext};
use super::subset::ScoredSubset;
use super::update::{estimate, predict, update};
use super::greedy::greedy_subsets;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterParams {
    pub w_max: usize,
    pub p_max: usize,
    pub r_prune: f64,
    pub cap_per_target: usize,
    /// `Some(n)` runs the particle implementation with `n` particles per
    /// component; `None` the Gaussian-mixture one.
    pub particles: Option<usize>,
    pub ut: UnscentedParams,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self { w_max: 4, p_max: 4, r_prune: 0.05, cap_per_target: 4, particles: None, ut: UnscentedParams::default() }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if self.w_max == 0 || self.p_max == 0 {
            return Err(Error::Config("w_max and p_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.r_prune) {
            return Err(Error::Config(format!("r_prune: must be in [0, 1], got {}", self.r_prune)));
        }
        if self.particles == Some(0) {
            return Err(Error::Config("particles: must be positive".into()));
        }
        Ok(())
    }
}

/// Models the filter assumes.
#[derive(Clone, Debug)]
pub struct FilterModels {
    pub motion: MotionModel,
    pub sensors: Vec<Sensor>,
    pub birth: BirthModel,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepDiagnostics {
    pub elapsed: Duration,
    pub predicted_components: usize,
    /// Number of scored subsets per predicted component.
    pub subset_counts: Vec<usize>,
    pub partitions: usize,
    /// Shannon entropy (nats) of the partition weights.
    pub alpha_entropy: f64,
    pub updated_components: usize,
}

/// Intermediate products of one scan, kept for inspection and testing.
#[derive(Clone, Debug)]
pub struct ScanTrace {
    pub predicted: MultiBernoulli,
    pub subsets: Vec<Vec<ScoredSubset>>,
    pub partitions: Vec<QuasiPartition>,
}

/// Scores and partitions for an already predicted multi-Bernoulli.
pub fn associate(
    predicted: &MultiBernoulli,
    ctx: &ScanContext<'_>,
    w_max: usize,
    p_max: usize,
) -> Result<(Vec<Vec<ScoredSubset>>, Vec<QuasiPartition>)> {
    let subsets = predicted
        .components
        .iter()
        .map(|b| greedy_subsets(Lead::Existence(b.r), &b.pdf, ctx, w_max))
        .collect::<Result<Vec<_>>>()?;
    let partitions = greedy_partitions(&subsets, ctx, p_max);
    Ok((subsets, partitions))
}

/// One full scan: predict, score subsets, select partitions and update.
pub fn step<R: Rng + ?Sized>(
    mb: &MultiBernoulli,
    measurements: &MeasurementSet,
    models: &FilterModels,
    params: &FilterParams,
    rng: &mut R,
) -> Result<(MultiBernoulli, StepDiagnostics)> {
    let (out, diag, _) = step_traced(mb, measurements, models, params, rng)?;
    Ok((out, diag))
}

/// [`step`] that also returns the intermediate products.
pub fn step_traced<R: Rng + ?Sized>(
    mb: &MultiBernoulli,
    measurements: &MeasurementSet,
    models: &FilterModels,
    params: &FilterParams,
    rng: &mut R,
) -> Result<(MultiBernoulli, StepDiagnostics, ScanTrace)> {
    let start = Instant::now();
    let ctx = ScanContext::new(&models.sensors, measurements, params.ut)?;
    let predicted = predict(mb, &models.motion, &models.birth, params.particles, rng)?;
    let (subsets, partitions) = associate(&predicted, &ctx, params.w_max, params.p_max)?;
    let updated = update(
        &predicted,
        &subsets,
        &partitions,
        params.r_prune,
        params.cap_per_target,
        params.particles,
        rng,
    )?;
    let alpha_entropy = partitions
        .iter()
        .filter(|p| p.alpha > 0.0)
        .map(|p| -p.alpha * p.alpha.ln())
        .sum();
    let diag = StepDiagnostics {
        elapsed: start.elapsed(),
        predicted_components: predicted.len(),
        subset_counts: subsets.iter().map(Vec::len).collect(),
        partitions: partitions.len(),
        alpha_entropy,
        updated_components: updated.len(),
    };
    Ok((updated, diag, ScanTrace { predicted, subsets, partitions }))
}

/// Stateful wrapper running [`step`] scan after scan.
#[derive(Clone, Debug)]
pub struct MsMemberFilter {
    pub models: FilterModels,
    pub params: FilterParams,
    pub state: MultiBernoulli,
}

impl MsMemberFilter {
    pub fn new(models: FilterModels, params: FilterParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { models, params, state: MultiBernoulli::default() })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, measurements: &MeasurementSet, rng: &mut R) -> Result<StepDiagnostics> {
        let (next, diag) = step(&self.state, measurements, &self.models, &self.params, rng)?;
        self.state = next;
        Ok(diag)
    }

    pub fn estimates(&self) -> Vec<StateVector> {
        estimate(&self.state)
    }
}
