//! Truncated multi-sensor CPHD filter. The posterior is an iid cluster
//! process: a PHD mixture plus a cardinality distribution. In the update
//! each mixture component takes a single multi-sensor subset per
//! quasi-partition, chosen by the same greedy machinery as the
//! multi-Bernoulli filter.
//!
//! The partition weights and the cardinality update follow the standard
//! CPHD measurement update driven by the per-component subset scores.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimation::UnscentedParams;
use crate::member::{
    clutter_term, greedy_subsets, predict_density, select_partition_paths, to_particles, FilterModels, Lead, MultiSensorSubset,
    ScanContext, ScoredSubset,
};
use crate::models::{BirthModel, MeasurementSet, MotionModel};
use crate::numeric::log_sum_exp;
use crate::rfs::{Density, StateCov, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct TcphdParams {
    pub w_max: usize,
    pub p_max: usize,
    /// Mixture components below this weight are dropped.
    pub prune: f64,
    pub cap_per_target: usize,
    /// Squared Mahalanobis distance under which Gaussian components are
    /// merged after pruning.
    pub merge_threshold: f64,
    /// Largest cardinality represented.
    pub n_max: usize,
    pub particles: Option<usize>,
    pub ut: UnscentedParams,
}

impl Default for TcphdParams {
    fn default() -> Self {
        Self { w_max: 4, p_max: 4, prune: 1e-3, cap_per_target: 4, merge_threshold: 4.0, n_max: 20, particles: None, ut: UnscentedParams::default() }
    }
}

/// PHD mixture `Σ ω_j p_j(x)` and cardinality distribution over `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct IidClusterState {
    pub components: Vec<(f64, Density)>,
    pub cardinality: Vec<f64>,
}

impl IidClusterState {
    /// No targets with certainty.
    pub fn empty(n_max: usize) -> Self {
        let mut cardinality = vec![0.0; n_max + 1];
        cardinality[0] = 1.0;
        Self { components: Vec::new(), cardinality }
    }

    pub fn phd_mass(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    pub fn mean_cardinality(&self) -> f64 {
        self.cardinality.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Most probable cardinality, lower value on ties.
    pub fn map_cardinality(&self) -> usize {
        let mut best = 0;
        for (n, &p) in self.cardinality.iter().enumerate() {
            if p > self.cardinality[best] {
                best = n;
            }
        }
        best
    }
}

fn ln(v: f64) -> f64 {
    if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }
}

fn normalize(p: &mut [f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateWeights(total));
    }
    p.iter_mut().for_each(|v| *v /= total);
    Ok(())
}

fn poisson_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut term = (-mean).exp();
    for n in 0..=n_max {
        out.push(term);
        term *= mean / (n + 1) as f64;
    }
    out
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_falling(n, k) - ln_falling(k, k)
}

/// `ln n!/(n-k)!`
fn ln_falling(n: usize, k: usize) -> f64 {
    ((n - k + 1)..=n).map(|v| (v as f64).ln()).sum()
}

/// Survival thinning of a cardinality distribution followed by
/// convolution with the birth cardinality, truncated and renormalized.
pub fn predict_cardinality(card: &[f64], ps: f64, birth: &[f64]) -> Result<Vec<f64>> {
    let n_max = card.len() - 1;
    let mut survived = vec![0.0; n_max + 1];
    for (m, &pm) in card.iter().enumerate() {
        if pm == 0.0 {
            continue;
        }
        for (n, slot) in survived.iter_mut().enumerate().take(m + 1) {
            *slot += pm * ln_binomial(m, n).exp() * ps.powi(n as i32) * (1.0 - ps).powi((m - n) as i32);
        }
    }
    let mut out = vec![0.0; n_max + 1];
    for (a, &pa) in survived.iter().enumerate() {
        for (b, &pb) in birth.iter().enumerate() {
            if a + b <= n_max {
                out[a + b] += pa * pb;
            }
        }
    }
    normalize(&mut out)?;
    Ok(out)
}

/// CPHD prediction: survival-thinned propagated PHD plus birth PHD, and
/// the matching cardinality prediction with Poisson birth cardinality of
/// mean `Σ birth r`.
pub fn tcphd_predict<R: Rng + ?Sized>(
    state: &IidClusterState,
    motion: &MotionModel,
    birth: &BirthModel,
    particles: Option<usize>,
    rng: &mut R,
) -> Result<IidClusterState> {
    let mut components: Vec<(f64, Density)> = state
        .components
        .iter()
        .map(|(w, d)| (w * motion.ps, predict_density(d, motion, rng)))
        .collect();
    for b in &birth.components {
        let pdf = match particles {
            Some(n) => Density::Particles(to_particles(&b.pdf, n, rng)?),
            None => b.pdf.clone(),
        };
        components.push((b.r, pdf));
    }
    let n_max = state.cardinality.len() - 1;
    let birth_mean: f64 = birth.components.iter().map(|b| b.r).sum();
    let cardinality = predict_cardinality(&state.cardinality, motion.ps, &poisson_pmf(birth_mean, n_max))?;
    Ok(IidClusterState { components, cardinality })
}

/// Ranked subsets of every component, scored with the component weight
/// as the leading factor. The empty subset scores one.
pub fn tcphd_score(state: &IidClusterState, ctx: &ScanContext<'_>, w_max: usize) -> Result<Vec<Vec<ScoredSubset>>> {
    state
        .components
        .iter()
        .map(|(w, d)| greedy_subsets(Lead::Intensity(*w), d, ctx, w_max))
        .collect()
}

/// One retained partition of the truncated update.
#[derive(Clone, Debug, PartialEq)]
pub struct TcphdPartition {
    pub choices: Vec<usize>,
    /// Number of non-empty assignments.
    pub detected: usize,
    pub alpha: f64,
    /// Missed-detection weight of this partition per unit normalized PHD.
    pub missed_ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TcphdDiagnostics {
    pub elapsed: Duration,
    pub predicted_components: usize,
    pub subset_counts: Vec<usize>,
    pub partitions: usize,
    pub updated_components: usize,
}

// ln Σ_n p(n) n!/(n-k)! η^(n-k) over n ≥ k
fn ln_upsilon(card: &[f64], k: usize, ln_eta: f64) -> f64 {
    let terms: Vec<f64> = (k..card.len())
        .map(|n| {
            let e = if n == k { 0.0 } else { (n - k) as f64 * ln_eta };
            ln(card[n]) + ln_falling(n, k) + e
        })
        .collect();
    log_sum_exp(&terms)
}

/// Partition weights, missed-detection ratios and the updated cardinality.
pub fn tcphd_partitions(
    predicted: &IidClusterState,
    subsets: &[Vec<ScoredSubset>],
    ctx: &ScanContext<'_>,
    p_max: usize,
) -> Result<(Vec<TcphdPartition>, Vec<f64>)> {
    let n_bar = predicted.phd_mass();
    let ln_n_bar = ln(n_bar);
    let eta = if n_bar > 0.0 {
        subsets
            .iter()
            .zip(&predicted.components)
            .map(|(s, (w, _))| w * s[0].log_mass.exp())
            .sum::<f64>()
            / n_bar
    } else {
        ctx.sensors.iter().map(|s| 1.0 - s.pd()).product()
    };
    let ln_eta = ln(eta);
    let card = &predicted.cardinality;

    let mut paths = select_partition_paths(subsets, p_max);
    if !paths.iter().any(|(c, _)| c.iter().all(|&l| l == 0)) {
        paths.push((vec![0; subsets.len()], 0.0));
    }

    let mut scored = Vec::with_capacity(paths.len());
    for (choices, _) in paths {
        let mut ln_d = 0.0;
        let mut detected = 0;
        for (j, &c) in choices.iter().enumerate() {
            let s = &subsets[j][c];
            if s.subset.is_empty() {
                continue;
            }
            detected += 1;
            ln_d += s.log_beta - ln_n_bar;
        }
        ln_d += clutter_term(subsets, &choices, ctx);
        if detected >= card.len() {
            continue;
        }
        let ln_u0 = ln_upsilon(card, detected, ln_eta);
        let ln_u1 = ln_upsilon(card, detected + 1, ln_eta);
        scored.push((choices, detected, ln_d + ln_u0, ln_d, ln_u1 - ln_u0));
    }

    let lse = log_sum_exp(&scored.iter().map(|s| s.2).collect::<Vec<_>>());
    let usable = lse.is_finite();
    let mut parts = Vec::new();
    let mut cardinality = vec![0.0; card.len()];
    for (choices, detected, ln_w, ln_d, ln_ratio) in scored {
        let alpha = if usable {
            (ln_w - lse).exp()
        } else if detected == 0 {
            1.0
        } else {
            0.0
        };
        if alpha == 0.0 {
            continue;
        }
        if usable {
            for n in detected..card.len() {
                let e = if n == detected { 0.0 } else { (n - detected) as f64 * ln_eta };
                let v = ln(card[n]) + ln_falling(n, detected) + e + ln_d - lse;
                cardinality[n] += v.exp();
            }
        }
        let missed_ratio = if ln_ratio.is_finite() { ln_ratio.exp() } else { 0.0 };
        parts.push(TcphdPartition { choices, detected, alpha, missed_ratio });
    }
    if normalize(&mut cardinality).is_err() {
        cardinality = card.clone();
    }
    Ok((parts, cardinality))
}

/// Measurement update of the predicted iid cluster state.
pub fn tcphd_update<R: Rng + ?Sized>(
    predicted: &IidClusterState,
    subsets: &[Vec<ScoredSubset>],
    ctx: &ScanContext<'_>,
    params: &TcphdParams,
    rng: &mut R,
) -> Result<(IidClusterState, usize)> {
    let (parts, cardinality) = tcphd_partitions(predicted, subsets, ctx, params.p_max)?;
    let n_bar = predicted.phd_mass();
    let alpha0: f64 = parts.iter().map(|p| p.alpha * p.missed_ratio).sum();

    let mut index: HashMap<(usize, MultiSensorSubset), usize> = HashMap::new();
    let mut out: Vec<(f64, Density)> = Vec::new();
    let mut push = |key: (usize, MultiSensorSubset), w: f64, pdf: &Density| match index.get(&key) {
        Some(&i) => out[i].0 += w,
        None => {
            index.insert(key, out.len());
            out.push((w, pdf.clone()));
        }
    };
    if n_bar > 0.0 {
        for (j, (w, pdf)) in predicted.components.iter().enumerate() {
            let s = &subsets[j][0];
            let weight = alpha0 * w / n_bar * s.log_mass.exp();
            push((j, s.subset.clone()), weight, s.posterior.as_ref().unwrap_or(pdf));
        }
    }
    for p in &parts {
        for (j, &c) in p.choices.iter().enumerate() {
            let s = &subsets[j][c];
            if let (false, Some(pdf)) = (s.subset.is_empty(), &s.posterior) {
                push((j, s.subset.clone()), p.alpha, pdf);
            }
        }
    }

    let mut state = IidClusterState { components: out, cardinality };
    let cap = params.cap_per_target.saturating_mul(state.map_cardinality().max(1));
    state.components.retain(|(w, _)| *w >= params.prune);
    let merged = merge_components(&state.components, params.merge_threshold)?;
    let mut keep: Vec<usize> = (0..merged.len()).collect();
    if keep.len() > cap {
        keep.sort_by(|&a, &b| merged[b].0.total_cmp(&merged[a].0));
        keep.truncate(cap);
        keep.sort_unstable();
    }
    let mut components: Vec<(f64, Density)> = keep.into_iter().map(|i| merged[i].clone()).collect();
    let mass: f64 = components.iter().map(|(w, _)| w).sum();
    let target = state.mean_cardinality();
    if mass > 0.0 {
        components.iter_mut().for_each(|(w, _)| *w *= target / mass);
    }
    if let Some(n) = params.particles {
        for (_, d) in &mut components {
            *d = Density::Particles(to_particles(d, n, rng)?);
        }
    }
    state.components = components;
    Ok((state, parts.len()))
}

fn moments(pdf: &Density) -> Option<(StateVector, StateCov)> {
    let Density::GaussianMixture(g) = pdf else { return None };
    let mean = pdf.mean();
    let mut cov = StateCov::zeros();
    for c in g {
        let d = c.mean - mean;
        cov += (c.cov + d * d.transpose()) * c.weight;
    }
    Some((mean, cov))
}

/// Greedy moment-matching merge. Starting from the heaviest remaining
/// component, every Gaussian mixture density whose mean lies within squared
/// Mahalanobis distance `threshold` of it (under its covariance) is folded
/// into one Gaussian. Particle densities are passed through unchanged.
pub fn merge_components(components: &[(f64, Density)], threshold: f64) -> Result<Vec<(f64, Density)>> {
    let stats: Vec<Option<(StateVector, StateCov)>> = components.iter().map(|(_, d)| moments(d)).collect();
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by(|&a, &b| components[b].0.total_cmp(&components[a].0));
    let mut used = vec![false; components.len()];
    let mut out = Vec::with_capacity(components.len());
    for &lead in &order {
        if used[lead] {
            continue;
        }
        used[lead] = true;
        let Some((m0, p0)) = &stats[lead] else {
            out.push(components[lead].clone());
            continue;
        };
        let inv = p0.try_inverse().ok_or(Error::InvalidCovariance)?;
        let mut group = vec![lead];
        for &i in &order {
            if let (false, Some((m, _))) = (used[i], &stats[i]) {
                let d = m - m0;
                if (d.transpose() * inv * d)[0] <= threshold {
                    used[i] = true;
                    group.push(i);
                }
            }
        }
        if group.len() == 1 {
            out.push(components[lead].clone());
            continue;
        }
        let w: f64 = group.iter().map(|&i| components[i].0).sum();
        let mean = group.iter().fold(StateVector::zeros(), |acc, &i| acc + stats[i].as_ref().unwrap().0 * components[i].0) / w;
        let cov = group.iter().fold(StateCov::zeros(), |acc, &i| {
            let (m, p) = stats[i].as_ref().unwrap();
            let d = m - mean;
            acc + (p + d * d.transpose()) * components[i].0
        }) / w;
        out.push((w, Density::gaussian(mean, (cov + cov.transpose()) * 0.5)?));
    }
    Ok(out)
}

/// Means of the `N̂` heaviest components, `N̂` the most probable
/// cardinality. Ties go to the lower component index.
pub fn tcphd_estimate(state: &IidClusterState) -> Vec<StateVector> {
    let n = state.map_cardinality();
    let mut order: Vec<usize> = (0..state.components.len()).collect();
    order.sort_by(|&a, &b| state.components[b].0.total_cmp(&state.components[a].0));
    order.truncate(n);
    order.sort_unstable();
    order.into_iter().map(|i| state.components[i].1.mean()).collect()
}

/// Stateful truncated CPHD filter.
#[derive(Clone, Debug)]
pub struct TcphdFilter {
    pub models: FilterModels,
    pub params: TcphdParams,
    pub state: IidClusterState,
}

impl TcphdFilter {
    pub fn new(models: FilterModels, params: TcphdParams) -> Result<Self> {
        if params.w_max == 0 || params.p_max == 0 || params.n_max == 0 {
            return Err(Error::Config("w_max, p_max and n_max must be at least 1".into()));
        }
        let state = IidClusterState::empty(params.n_max);
        Ok(Self { models, params, state })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, measurements: &MeasurementSet, rng: &mut R) -> Result<TcphdDiagnostics> {
        let start = Instant::now();
        let ctx = ScanContext::new(&self.models.sensors, measurements, self.params.ut)?;
        let predicted =
            tcphd_predict(&self.state, &self.models.motion, &self.models.birth, self.params.particles, rng)?;
        let subsets = tcphd_score(&predicted, &ctx, self.params.w_max)?;
        let (state, partitions) = tcphd_update(&predicted, &subsets, &ctx, &self.params, rng)?;
        let diag = TcphdDiagnostics {
            elapsed: start.elapsed(),
            predicted_components: predicted.components.len(),
            subset_counts: subsets.iter().map(Vec::len).collect(),
            partitions,
            updated_components: state.components.len(),
        };
        self.state = state;
        Ok(diag)
    }

    pub fn estimates(&self) -> Vec<StateVector> {
        tcphd_estimate(&self.state)
    }
}
