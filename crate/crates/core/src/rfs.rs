//! Random finite set primitives: single-target densities, Bernoulli
//! components and multi-Bernoulli sets, plus the algebra the filters need
//! (PHD extraction, pruning, capping and duplicate collapse).

use std::collections::HashMap;
use std::hash::Hash;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::numeric::checked_covariance;

/// Target state `[x, y, vx, vy]` in meters and meters per second.
pub type StateVector = Vector4<f64>;
/// Covariance of a [`StateVector`].
pub type StateCov = Matrix4<f64>;

const NORMALIZATION_TOL: f64 = 1e-9;

/// One weighted Gaussian term of a mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: StateVector,
    pub cov: StateCov,
}

impl GaussianComponent {
    pub fn new(weight: f64, mean: StateVector, cov: StateCov) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::DegenerateWeights(weight));
        }
        if !mean.iter().all(|v| v.is_finite()) {
            return Err(Error::Dimension("non-finite mean".into()));
        }
        let cov = checked_covariance(&cov)?;
        Ok(Self { weight, mean, cov })
    }

    /// Position marginal density `N([x, y]; mean[0..2], cov[0..2, 0..2])`,
    /// weighted.
    pub fn position_pdf(&self, x: f64, y: f64) -> f64 {
        let cov: Matrix2<f64> = self.cov.fixed_view::<2, 2>(0, 0).into_owned();
        let d = Vector2::new(x - self.mean[0], y - self.mean[1]);
        let det = cov.determinant();
        let inv = match cov.try_inverse() {
            Some(m) => m,
            None => return 0.0,
        };
        let maha = (d.transpose() * inv * d)[0];
        self.weight * (-0.5 * maha).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }
}

/// Weighted particle approximation. Weights are kept normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleDensity {
    weights: Vec<f64>,
    states: Vec<StateVector>,
}

impl ParticleDensity {
    /// Builds a density from unnormalized weights; fails if they do not sum
    /// to a positive finite number.
    pub fn new(weights: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} particles",
                weights.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::EmptyDensity);
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::DegenerateWeights(f64::NAN));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateWeights(total));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { weights, states })
    }

    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let n = states.len();
        Self::new(vec![1.0; n], states)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn mean(&self) -> StateVector {
        self.weights
            .iter()
            .zip(&self.states)
            .fold(StateVector::zeros(), |acc, (w, x)| acc + x * *w)
    }

    pub(crate) fn with_states(&self, states: Vec<StateVector>) -> Self {
        debug_assert_eq!(states.len(), self.weights.len());
        Self { weights: self.weights.clone(), states }
    }
}

/// Single-target density of a Bernoulli component or PHD term.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    GaussianMixture(Vec<GaussianComponent>),
    Particles(ParticleDensity),
}

impl Density {
    pub fn gaussian(mean: StateVector, cov: StateCov) -> Result<Self> {
        Ok(Density::GaussianMixture(vec![GaussianComponent::new(1.0, mean, cov)?]))
    }

    /// Validates and normalizes a Gaussian mixture.
    pub fn mixture(mut components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyDensity);
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::DegenerateWeights(total));
        }
        for c in &mut components {
            c.weight /= total;
        }
        Ok(Density::GaussianMixture(components))
    }

    pub fn mean(&self) -> StateVector {
        match self {
            Density::GaussianMixture(cs) => cs
                .iter()
                .fold(StateVector::zeros(), |acc, c| acc + c.mean * c.weight),
            Density::Particles(p) => p.mean(),
        }
    }

    /// Number of mixture terms or particles.
    pub fn len(&self) -> usize {
        match self {
            Density::GaussianMixture(cs) => cs.len(),
            Density::Particles(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_normalized(&self) -> bool {
        let total: f64 = match self {
            Density::GaussianMixture(cs) => cs.iter().map(|c| c.weight).sum(),
            Density::Particles(p) => p.weights.iter().sum(),
        };
        !self.is_empty() && (total - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Position-marginal density value. Only defined for Gaussian mixtures.
    pub fn position_pdf(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Density::GaussianMixture(cs) => Some(cs.iter().map(|c| c.position_pdf(x, y)).sum()),
            Density::Particles(_) => None,
        }
    }
}

/// Bernoulli RFS: empty with probability `1 - r`, otherwise a single target
/// distributed according to `pdf`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bernoulli {
    pub r: f64,
    pub pdf: Density,
}

impl Bernoulli {
    pub fn new(r: f64, pdf: Density) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidProbability(r));
        }
        if !pdf.is_normalized() {
            return Err(Error::DegenerateWeights(f64::NAN));
        }
        Ok(Self { r, pdf })
    }
}

/// Union of independent Bernoulli components.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiBernoulli {
    pub components: Vec<Bernoulli>,
}

impl MultiBernoulli {
    pub fn new(components: Vec<Bernoulli>) -> Self {
        Self { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn existence(&self) -> impl Iterator<Item = f64> + '_ {
        self.components.iter().map(|c| c.r)
    }
}

/// Unnormalized PHD `Σ r_i p_i(x)` together with its total mass.
#[derive(Clone, Debug)]
pub struct PhdIntensity {
    pub terms: Vec<(f64, Density)>,
    pub mass: f64,
}

impl PhdIntensity {
    /// Position-marginal intensity; `None` if any term is particle based.
    pub fn position_intensity(&self, x: f64, y: f64) -> Option<f64> {
        self.terms
            .iter()
            .map(|(w, d)| d.position_pdf(x, y).map(|v| w * v))
            .sum()
    }
}

pub fn phd_intensity(mb: &MultiBernoulli) -> PhdIntensity {
    let terms: Vec<(f64, Density)> = mb.components.iter().map(|c| (c.r, c.pdf.clone())).collect();
    PhdIntensity { terms, mass: mean_cardinality(mb) }
}

pub fn mean_cardinality(mb: &MultiBernoulli) -> f64 {
    mb.components.iter().map(|c| c.r).sum()
}

/// Drops components with `r < r_threshold`, then keeps at most
/// `max_components` by descending `r`. Relative order is preserved and ties
/// go to the earlier component.
pub fn prune_and_cap(mb: &MultiBernoulli, r_threshold: f64, max_components: usize) -> MultiBernoulli {
    let mut keep: Vec<usize> = (0..mb.len()).filter(|&i| mb.components[i].r >= r_threshold).collect();
    if keep.len() > max_components {
        keep.sort_by(|&a, &b| mb.components[b].r.total_cmp(&mb.components[a].r));
        keep.truncate(max_components);
        keep.sort_unstable();
    }
    MultiBernoulli::new(keep.into_iter().map(|i| mb.components[i].clone()).collect())
}

/// Slack allowed when summed existence probabilities overshoot 1.
pub const COLLAPSE_TOL: f64 = 1e-9;

/// Merges entries sharing a key by summing existence probabilities. The pdf
/// of the first occurrence is kept; output order follows first occurrence.
pub fn collapse_duplicates<K: Eq + Hash>(entries: Vec<(K, Bernoulli)>) -> Result<MultiBernoulli> {
    let mut index: HashMap<K, usize> = HashMap::with_capacity(entries.len());
    let mut out: Vec<Bernoulli> = Vec::with_capacity(entries.len());
    for (key, b) in entries {
        match index.get(&key) {
            Some(&i) => out[i].r += b.r,
            None => {
                index.insert(key, out.len());
                out.push(b);
            }
        }
    }
    for b in &mut out {
        if b.r > 1.0 + COLLAPSE_TOL {
            return Err(Error::CollapseOverflow { sum: b.r });
        }
        b.r = b.r.min(1.0);
    }
    Ok(MultiBernoulli::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_gaussian(x: f64, y: f64) -> Density {
        Density::gaussian(StateVector::new(x, y, 0.0, 0.0), StateCov::identity() * 25.0).unwrap()
    }

    fn mb_with(rs: &[f64]) -> MultiBernoulli {
        MultiBernoulli::new(
            rs.iter()
                .enumerate()
                .map(|(i, &r)| Bernoulli::new(r, unit_gaussian(i as f64, 0.0)).unwrap())
                .collect(),
        )
    }

    #[test]
    fn phd_of_empty_set_is_zero() {
        let phd = phd_intensity(&MultiBernoulli::default());
        assert_eq!(phd.mass, 0.0);
        assert!(phd.terms.is_empty());
        assert_eq!(phd.position_intensity(0.0, 0.0), Some(0.0));
    }

    #[test]
    fn phd_of_certain_component_is_its_pdf() {
        let mb = mb_with(&[1.0]);
        let phd = phd_intensity(&mb);
        assert_eq!(phd.mass, 1.0);
        let expected = mb.components[0].pdf.position_pdf(1.0, -2.0).unwrap();
        assert_eq!(phd.position_intensity(1.0, -2.0).unwrap(), expected);
    }

    #[test]
    fn phd_grid_integral_matches_mass() {
        let mb = MultiBernoulli::new(vec![
            Bernoulli::new(0.3, unit_gaussian(-10.0, 5.0)).unwrap(),
            Bernoulli::new(0.7, unit_gaussian(20.0, -3.0)).unwrap(),
        ]);
        let phd = phd_intensity(&mb);
        assert_eq!(phd.mass, 1.0);
        // Midpoint rule on [-60, 70]^2 with 0.5 m cells.
        let h = 0.5;
        let mut total = 0.0;
        let n = (130.0 / h) as usize;
        for i in 0..n {
            for k in 0..n {
                let x = -60.0 + (i as f64 + 0.5) * h;
                let y = -60.0 + (k as f64 + 0.5) * h;
                total += phd.position_intensity(x, y).unwrap() * h * h;
            }
        }
        assert!((total - 1.0).abs() < 1e-3, "integral {total}");
    }

    #[test]
    fn mean_cardinality_examples() {
        assert_eq!(mean_cardinality(&MultiBernoulli::default()), 0.0);
        assert_eq!(mean_cardinality(&mb_with(&[0.5, 0.5])), 1.0);
        assert!((mean_cardinality(&mb_with(&[0.9, 0.9, 0.2])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn prune_threshold_drops_low_existence() {
        let out = prune_and_cap(&mb_with(&[0.04, 0.5]), 0.05, 10);
        assert_eq!(out.existence().collect::<Vec<_>>(), vec![0.5]);
    }

    #[test]
    fn prune_identity_and_top_k() {
        let mb = mb_with(&[0.1, 0.0, 0.7]);
        assert_eq!(prune_and_cap(&mb, 0.0, usize::MAX), mb);
        let out = prune_and_cap(&mb_with(&[0.9, 0.8, 0.7]), 0.0, 2);
        assert_eq!(out.existence().collect::<Vec<_>>(), vec![0.9, 0.8]);
    }

    #[test]
    fn prune_ties_keep_earlier() {
        let mb = mb_with(&[0.5, 0.9, 0.5, 0.5]);
        let out = prune_and_cap(&mb, 0.0, 2);
        assert_eq!(out.components[0], mb.components[0]);
        assert_eq!(out.components[1], mb.components[1]);
    }

    #[test]
    fn collapse_sums_shared_keys() {
        let a = Bernoulli::new(0.2, unit_gaussian(0.0, 0.0)).unwrap();
        let b = Bernoulli::new(0.3, unit_gaussian(0.0, 0.0)).unwrap();
        let out = collapse_duplicates(vec![("k", a), ("k", b)]).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.components[0].r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collapse_distinct_keys_is_identity() {
        let mb = mb_with(&[0.2, 0.3, 0.4]);
        let entries = mb.components.iter().cloned().enumerate().collect();
        assert_eq!(collapse_duplicates(entries).unwrap(), mb);
    }

    #[test]
    fn collapse_overflow_is_error_but_rounding_is_clamped() {
        let a = Bernoulli::new(0.6, unit_gaussian(0.0, 0.0)).unwrap();
        let mut b = a.clone();
        b.r = 0.4 + 5e-10;
        let out = collapse_duplicates(vec![(0, a.clone()), (0, b)]).unwrap();
        assert_eq!(out.components[0].r, 1.0);
        let mut c = a.clone();
        c.r = 0.5;
        assert!(matches!(
            collapse_duplicates(vec![(0, a), (0, c)]),
            Err(Error::CollapseOverflow { .. })
        ));
    }

    #[test]
    fn bernoulli_rejects_bad_r() {
        assert!(Bernoulli::new(1.5, unit_gaussian(0.0, 0.0)).is_err());
        assert!(Bernoulli::new(-0.1, unit_gaussian(0.0, 0.0)).is_err());
    }

    #[test]
    fn particle_density_normalizes() {
        let p = ParticleDensity::new(vec![1.0, 3.0], vec![StateVector::zeros(), StateVector::repeat(4.0)]).unwrap();
        assert_eq!(p.weights(), &[0.25, 0.75]);
        assert_eq!(p.mean(), StateVector::repeat(3.0));
        assert!(ParticleDensity::new(vec![0.0], vec![StateVector::zeros()]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn prune_and_cap_is_idempotent(rs in prop::collection::vec(0.0f64..=1.0, 0..12), thr in 0.0f64..0.6, cap in 0usize..8) {
                let mb = mb_with(&rs);
                let once = prune_and_cap(&mb, thr, cap);
                let twice = prune_and_cap(&once, thr, cap);
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn mass_equals_mean_cardinality(rs in prop::collection::vec(0.0f64..=1.0, 0..12)) {
                let mb = mb_with(&rs);
                prop_assert_eq!(phd_intensity(&mb).mass, mean_cardinality(&mb));
            }
        }
    }
}
