use crate::error::Result;
use crate::numeric::log_sum_exp;
use crate::rfs::Density;

use super::scoring::{scored_from_path, Lead, PathState, ScanContext};
use super::subset::{MultiSensorSubset, ScoredSubset};

/// Greedy subset selection for one component. Sensors are visited in
/// order; every retained partial subset branches on each measurement of the
/// sensor or on a miss. The all-empty path always survives and at most
/// `w_max` non-empty paths are kept by descending score.
///
/// The output starts with the all-empty subset followed by the non-empty
/// subsets by descending score.
pub fn greedy_subsets(lead: Lead, prior: &Density, ctx: &ScanContext<'_>, w_max: usize) -> Result<Vec<ScoredSubset>> {
    let s = ctx.num_sensors();
    let root = PathState::from_prior(prior);
    let mut paths: Vec<(MultiSensorSubset, PathState)> = vec![(MultiSensorSubset::empty(s), root)];

    for i in 0..s {
        let sensor = &ctx.sensors[i];
        let m = ctx.measurements.per_sensor[i].len();
        let mut empty_path = None;
        let mut candidates: Vec<(f64, MultiSensorSubset, PathState)> = Vec::with_capacity(paths.len() * (m + 1));
        for (l, (subset, state)) in paths.iter().enumerate() {
            for n in 0..=m {
                let z = (n > 0).then(|| ctx.measurement(i, n - 1));
                let next = state.extend(prior, sensor, z, &ctx.ut)?;
                let sub = subset.with_pick(i, (n > 0).then(|| n - 1));
                if l == 0 && n == 0 {
                    empty_path = Some((sub, next));
                    continue;
                }
                let score = lead_score(lead, &next);
                if score > f64::NEG_INFINITY {
                    candidates.push((score, sub, next));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
        candidates.truncate(w_max);
        paths = Vec::with_capacity(candidates.len() + 1);
        paths.push(empty_path.expect("the all-empty path is generated first"));
        paths.extend(candidates.into_iter().map(|(_, sub, st)| (sub, st)));
    }

    paths
        .into_iter()
        .map(|(sub, st)| scored_from_path(lead, prior, sub, &st))
        .collect()
}

// Scores of partial paths only rank non-empty candidates, which are all
// scaled by the same lead factor.
fn lead_score(lead: Lead, state: &PathState) -> f64 {
    let lead_ln = match lead {
        Lead::Existence(r) | Lead::Intensity(r) => {
            if r > 0.0 { r.ln() } else { f64::NEG_INFINITY }
        }
    };
    lead_ln + state.log_mass()
}

/// One retained quasi-partition: `choices[j]` indexes the subset assigned
/// to component `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiPartition {
    pub choices: Vec<usize>,
    /// `Σ_j ln β_j` of the assigned subsets.
    pub log_score: f64,
    /// `log_score` plus the clutter term.
    pub log_alpha_unnorm: f64,
    pub alpha: f64,
}

impl QuasiPartition {
    pub fn assigned<'a>(&'a self, subsets: &'a [Vec<ScoredSubset>]) -> impl Iterator<Item = &'a ScoredSubset> + 'a {
        self.choices.iter().enumerate().map(move |(j, &c)| &subsets[j][c])
    }
}

fn overlaps_path(subsets: &[Vec<ScoredSubset>], choices: &[usize], candidate: &MultiSensorSubset) -> bool {
    if candidate.is_empty() {
        return false;
    }
    choices
        .iter()
        .enumerate()
        .any(|(j, &c)| subsets[j][c].subset.overlaps(candidate))
}

/// Greedy path search over components in order. Each retained partial path
/// branches over the subsets of the next component that do not overlap it;
/// at most `p_max` paths survive by descending `Σ ln β`, ties resolved by
/// path index then subset index.
pub fn select_partition_paths(subsets: &[Vec<ScoredSubset>], p_max: usize) -> Vec<(Vec<usize>, f64)> {
    let mut paths: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 0.0)];
    for comp in subsets {
        let mut candidates = Vec::with_capacity(paths.len() * comp.len());
        for (choices, score) in &paths {
            for (l, s) in comp.iter().enumerate() {
                if overlaps_path(subsets, choices, &s.subset) {
                    continue;
                }
                let mut next = choices.clone();
                next.push(l);
                candidates.push((next, score + s.log_beta));
            }
        }
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        candidates.truncate(p_max);
        paths = candidates;
    }
    paths
}

/// `Σ_i |W_i^0| ln λ_i` for the measurements left to clutter.
pub fn clutter_term(subsets: &[Vec<ScoredSubset>], choices: &[usize], ctx: &ScanContext<'_>) -> f64 {
    let mut used = vec![0usize; ctx.num_sensors()];
    for (j, &c) in choices.iter().enumerate() {
        for (i, _) in subsets[j][c].subset.detections() {
            used[i] += 1;
        }
    }
    let mut total = 0.0;
    for (i, sensor) in ctx.sensors.iter().enumerate() {
        let free = ctx.measurements.per_sensor[i].len() - used[i];
        if free > 0 {
            let lambda = sensor.clutter_rate();
            total += if lambda > 0.0 { free as f64 * lambda.ln() } else { f64::NEG_INFINITY };
        }
    }
    total
}

/// Greedy quasi-partition selection followed by normalization of the
/// partition weights over the retained set. Partitions of zero weight are
/// dropped. If every retained partition is impossible the all-empty
/// partition is returned with weight one.
///
/// Every component's list must start with its all-empty subset.
pub fn greedy_partitions(
    subsets: &[Vec<ScoredSubset>],
    ctx: &ScanContext<'_>,
    p_max: usize,
) -> Vec<QuasiPartition> {
    let paths = select_partition_paths(subsets, p_max);
    let mut parts: Vec<QuasiPartition> = paths
        .into_iter()
        .map(|(choices, log_score)| {
            let log_alpha_unnorm = log_score + clutter_term(subsets, &choices, ctx);
            QuasiPartition { choices, log_score, log_alpha_unnorm, alpha: 0.0 }
        })
        .collect();
    let lse = log_sum_exp(&parts.iter().map(|p| p.log_alpha_unnorm).collect::<Vec<_>>());
    if !lse.is_finite() {
        let choices = vec![0; subsets.len()];
        let log_score = subsets.iter().map(|s| s[0].log_beta).sum();
        return vec![QuasiPartition { choices, log_score, log_alpha_unnorm: log_score, alpha: 1.0 }];
    }
    parts.retain(|p| p.log_alpha_unnorm > f64::NEG_INFINITY);
    for p in &mut parts {
        p.alpha = (p.log_alpha_unnorm - lse).exp();
    }
    parts
}
