use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimation::{resample, systematic_indices};
use crate::models::{BirthModel, MotionModel};
use crate::rfs::{
    collapse_duplicates, prune_and_cap, Bernoulli, Density, GaussianComponent, MultiBernoulli, ParticleDensity,
    StateVector,
};

use super::greedy::QuasiPartition;
use super::subset::{MultiSensorSubset, ScoredSubset};

/// Propagates a density through the motion model. Particles move with
/// sampled process noise and keep their weights.
pub fn predict_density<R: Rng + ?Sized>(pdf: &Density, motion: &MotionModel, rng: &mut R) -> Density {
    match pdf {
        Density::GaussianMixture(g) => Density::GaussianMixture(
            g.iter()
                .map(|c| {
                    let (mean, cov) = motion.predict_gaussian(&c.mean, &c.cov);
                    GaussianComponent { weight: c.weight, mean, cov }
                })
                .collect(),
        ),
        Density::Particles(p) => {
            let states = p.states().iter().map(|x| motion.predict_state(x, rng)).collect();
            Density::Particles(p.with_states(states))
        }
    }
}

/// Draws `n` equally weighted particles from a Gaussian mixture. Particle
/// densities are resampled to `n`.
pub fn to_particles<R: Rng + ?Sized>(pdf: &Density, n: usize, rng: &mut R) -> Result<ParticleDensity> {
    match pdf {
        Density::Particles(p) => Ok(resample(p, n, rng)),
        Density::GaussianMixture(g) => {
            let weights: Vec<f64> = g.iter().map(|c| c.weight).collect();
            let offset: f64 = rng.random::<f64>();
            let mut states = Vec::with_capacity(n);
            for i in systematic_indices(&weights, n, offset) {
                let c = &g[i];
                let l = c.cov.cholesky().ok_or(Error::InvalidCovariance)?.l();
                let e = StateVector::from_fn(|_, _| rng.sample(StandardNormal));
                states.push(c.mean + l * e);
            }
            ParticleDensity::uniform(states)
        }
    }
}

/// Multi-Bernoulli prediction: survivors are scaled by the survival
/// probability and propagated, then birth components are appended. With
/// `particles = Some(n)` the birth components are sampled to `n` particles.
pub fn predict<R: Rng + ?Sized>(
    mb: &MultiBernoulli,
    motion: &MotionModel,
    birth: &BirthModel,
    particles: Option<usize>,
    rng: &mut R,
) -> Result<MultiBernoulli> {
    let mut out: Vec<Bernoulli> = mb
        .components
        .iter()
        .map(|b| Bernoulli { r: b.r * motion.ps, pdf: predict_density(&b.pdf, motion, rng) })
        .collect();
    for b in &birth.components {
        let pdf = match particles {
            Some(n) => Density::Particles(to_particles(&b.pdf, n, rng)?),
            None => b.pdf.clone(),
        };
        out.push(Bernoulli { r: b.r, pdf });
    }
    Ok(MultiBernoulli::new(out))
}

/// Updated components of every retained partition before collapse.
///
/// For an empty assignment the component keeps its conditioned density and
/// existence `α r⟨p, γ⟩ / β`; otherwise it gets existence `α` and the
/// subset-conditioned density.
pub fn emit_components(
    predicted: &MultiBernoulli,
    subsets: &[Vec<ScoredSubset>],
    partitions: &[QuasiPartition],
) -> Vec<((usize, MultiSensorSubset), Bernoulli)> {
    let mut out = Vec::with_capacity(partitions.len() * predicted.len());
    for p in partitions {
        for (j, s) in p.assigned(subsets).enumerate() {
            let prior = &predicted.components[j];
            let (r, pdf) = if s.subset.is_empty() {
                let r = if prior.r > 0.0 && s.log_beta > f64::NEG_INFINITY {
                    p.alpha * (prior.r.ln() + s.log_mass - s.log_beta).exp()
                } else {
                    0.0
                };
                (r.min(p.alpha), s.posterior.clone().unwrap_or_else(|| prior.pdf.clone()))
            } else {
                match &s.posterior {
                    Some(pdf) => (p.alpha, pdf.clone()),
                    None => continue,
                }
            };
            out.push(((j, s.subset.clone()), Bernoulli { r, pdf }));
        }
    }
    out
}

/// Collapse, prune at `r_prune`, cap at `cap_per_target` per estimated
/// target, and resample particle densities to `particles`.
pub fn update<R: Rng + ?Sized>(
    predicted: &MultiBernoulli,
    subsets: &[Vec<ScoredSubset>],
    partitions: &[QuasiPartition],
    r_prune: f64,
    cap_per_target: usize,
    particles: Option<usize>,
    rng: &mut R,
) -> Result<MultiBernoulli> {
    let collapsed = collapse_duplicates(emit_components(predicted, subsets, partitions))?;
    let targets = collapsed.components.iter().filter(|b| b.r > 0.5).count();
    let mut mb = prune_and_cap(&collapsed, r_prune, cap_per_target.saturating_mul(targets.max(1)));
    if let Some(n) = particles {
        for b in &mut mb.components {
            b.pdf = Density::Particles(to_particles(&b.pdf, n, rng)?);
        }
    }
    Ok(mb)
}

/// Means of the components with `r > 0.5`.
pub fn estimate(mb: &MultiBernoulli) -> Vec<StateVector> {
    mb.components.iter().filter(|b| b.r > 0.5).map(|b| b.pdf.mean()).collect()
}
