use crate::error::{Error, Result};
use crate::estimation::UnscentedParams;
use crate::models::{MeasurementSet, Measurement, Sensor};
use crate::numeric::log_sum_exp;
use crate::rfs::{Density, GaussianComponent, ParticleDensity, StateCov, StateVector};

use super::subset::{MultiSensorSubset, ScoredSubset};

/// Sensors and measurements of the scan being processed.
#[derive(Clone, Copy, Debug)]
pub struct ScanContext<'a> {
    pub sensors: &'a [Sensor],
    pub measurements: &'a MeasurementSet,
    pub ut: UnscentedParams,
}

impl<'a> ScanContext<'a> {
    pub fn new(sensors: &'a [Sensor], measurements: &'a MeasurementSet, ut: UnscentedParams) -> Result<Self> {
        if sensors.len() != measurements.num_sensors() {
            return Err(Error::Dimension(format!(
                "{} sensors but measurements for {}",
                sensors.len(),
                measurements.num_sensors()
            )));
        }
        Ok(Self { sensors, measurements, ut })
    }

    pub fn num_sensors(&self) -> usize {
        self.sensors.len()
    }

    pub fn measurement(&self, sensor: usize, index: usize) -> &Measurement {
        &self.measurements.per_sensor[sensor][index]
    }
}

/// Factor in front of the subset integral.
///
/// `Existence(r)` gives the Bernoulli scores, where the empty subset scores
/// `1 - r + r⟨p, γ⟩`. `Intensity(w)` scales non-empty subsets by `w` and
/// gives the empty subset a neutral score of one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lead {
    Existence(f64),
    Intensity(f64),
}

impl Lead {
    fn log_beta(self, subset_empty: bool, log_mass: f64) -> f64 {
        match (self, subset_empty) {
            (Lead::Existence(r), true) => {
                let v = 1.0 - r + r * log_mass.exp();
                if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }
            }
            (Lead::Existence(r), false) | (Lead::Intensity(r), false) => {
                if r > 0.0 { r.ln() + log_mass } else { f64::NEG_INFINITY }
            }
            (Lead::Intensity(_), true) => 0.0,
        }
    }
}

/// Product of per-sensor miss probabilities at `x`.
pub fn gamma(x: &StateVector, sensors: &[Sensor]) -> f64 {
    sensors.iter().map(|s| 1.0 - s.pd_at(x)).product()
}

fn ln(v: f64) -> f64 {
    if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }
}

/// `ln f(W | x)`: detected sensors contribute `pD h(z|x) / c(z)`, the
/// others `1 - pD`.
pub fn ms_likelihood_f(subset: &MultiSensorSubset, x: &StateVector, ctx: &ScanContext<'_>) -> f64 {
    let mut total = 0.0;
    for (i, pick) in subset.picks().iter().enumerate() {
        let s = &ctx.sensors[i];
        total += match pick {
            Some(l) => {
                ln(s.pd_at(x)) + s.log_likelihood(ctx.measurement(i, *l), x) - s.clutter_density().ln()
            }
            None => ln(1.0 - s.pd_at(x)),
        };
    }
    total
}

#[derive(Clone, Debug)]
pub(crate) struct GaussTerm {
    pub log_w: f64,
    pub mean: StateVector,
    pub cov: StateCov,
}

/// Unnormalized subset-conditioned density built one sensor at a time.
#[derive(Clone, Debug)]
pub(crate) enum PathState {
    Gaussian(Vec<GaussTerm>),
    /// Log weights over the particles of the prior.
    Particles(Vec<f64>),
}

impl PathState {
    pub fn from_prior(prior: &Density) -> Self {
        match prior {
            Density::GaussianMixture(g) => PathState::Gaussian(
                g.iter()
                    .map(|c| GaussTerm { log_w: ln(c.weight), mean: c.mean, cov: c.cov })
                    .collect(),
            ),
            Density::Particles(p) => PathState::Particles(p.weights().iter().map(|&w| ln(w)).collect()),
        }
    }

    pub fn extend(
        &self,
        prior: &Density,
        sensor: &Sensor,
        z: Option<&Measurement>,
        ut: &UnscentedParams,
    ) -> Result<Self> {
        match (self, prior) {
            (PathState::Gaussian(terms), _) => {
                let mut out = Vec::with_capacity(terms.len());
                let ln_pd = ln(sensor.pd());
                for t in terms.iter().filter(|t| t.log_w > f64::NEG_INFINITY) {
                    match z {
                        None => out.push(GaussTerm { log_w: t.log_w + ln(1.0 - sensor.pd()), ..t.clone() }),
                        Some(z) => match sensor.update_gaussian(&t.mean, &t.cov, z, ut) {
                            Ok(u) => out.push(GaussTerm {
                                log_w: t.log_w + ln_pd + u.log_marginal - sensor.clutter_density().ln(),
                                mean: u.mean,
                                cov: u.cov,
                            }),
                            Err(Error::SingularInnovation | Error::DegenerateGeometry) => {}
                            Err(e) => return Err(e),
                        },
                    }
                }
                Ok(PathState::Gaussian(out))
            }
            (PathState::Particles(lw), Density::Particles(p)) => {
                let ln_c = sensor.clutter_density().ln();
                let out = lw
                    .iter()
                    .zip(p.states())
                    .map(|(&w, x)| {
                        if w == f64::NEG_INFINITY {
                            return w;
                        }
                        match z {
                            None => w + ln(1.0 - sensor.pd_at(x)),
                            Some(z) => w + ln(sensor.pd_at(x)) + sensor.log_likelihood(z, x) - ln_c,
                        }
                    })
                    .collect();
                Ok(PathState::Particles(out))
            }
            (PathState::Particles(_), Density::GaussianMixture(_)) => {
                Err(Error::Dimension("particle path on a Gaussian prior".into()))
            }
        }
    }

    pub fn log_mass(&self) -> f64 {
        match self {
            PathState::Gaussian(terms) => {
                log_sum_exp(&terms.iter().map(|t| t.log_w).collect::<Vec<_>>())
            }
            PathState::Particles(lw) => log_sum_exp(lw),
        }
    }

    /// Normalized density, or `None` when the path has zero mass.
    pub fn to_density(&self, prior: &Density) -> Result<Option<Density>> {
        let lse = self.log_mass();
        if !lse.is_finite() {
            return Ok(None);
        }
        match (self, prior) {
            (PathState::Gaussian(terms), _) => {
                let comps = terms
                    .iter()
                    .filter(|t| t.log_w > f64::NEG_INFINITY)
                    .map(|t| GaussianComponent::new((t.log_w - lse).exp(), t.mean, t.cov))
                    .collect::<Result<Vec<_>>>()?;
                Density::mixture(comps).map(Some)
            }
            (PathState::Particles(lw), Density::Particles(p)) => {
                let w = lw.iter().map(|v| (v - lse).exp()).collect();
                Ok(Some(Density::Particles(ParticleDensity::new(w, p.states().to_vec())?)))
            }
            _ => Err(Error::Dimension("particle path on a Gaussian prior".into())),
        }
    }
}

/// Conditions one Gaussian on a subset, sensor by sensor. Returns the
/// normalized posterior and `ln ∫ N(x) f(W | x) dx` (`-inf` when the subset
/// is impossible, in which case the prior is returned).
pub fn sequential_subset_update(
    prior: &GaussianComponent,
    subset: &MultiSensorSubset,
    ctx: &ScanContext<'_>,
) -> Result<(GaussianComponent, f64)> {
    let density = Density::GaussianMixture(vec![GaussianComponent { weight: 1.0, ..prior.clone() }]);
    let mut path = PathState::from_prior(&density);
    for (i, pick) in subset.picks().iter().enumerate() {
        path = path.extend(&density, &ctx.sensors[i], pick.map(|l| ctx.measurement(i, l)), &ctx.ut)?;
    }
    match path {
        PathState::Gaussian(mut terms) if !terms.is_empty() && terms[0].log_w.is_finite() => {
            let t = terms.remove(0);
            Ok((GaussianComponent { weight: 1.0, mean: t.mean, cov: t.cov }, t.log_w))
        }
        _ => Ok((GaussianComponent { weight: 1.0, ..prior.clone() }, f64::NEG_INFINITY)),
    }
}

pub(crate) fn scored_from_path(
    lead: Lead,
    prior: &Density,
    subset: MultiSensorSubset,
    path: &PathState,
) -> Result<ScoredSubset> {
    let log_mass = path.log_mass();
    let empty = subset.is_empty();
    let log_beta = lead.log_beta(empty, log_mass);
    let posterior = if empty && path_is_prior_shaped(prior, path) {
        Some(prior.clone())
    } else {
        path.to_density(prior)?
    };
    Ok(ScoredSubset { subset, log_beta, log_mass, posterior })
}

// With constant detection probabilities the empty path only rescales the
// prior, so the prior itself is the conditioned density.
fn path_is_prior_shaped(prior: &Density, path: &PathState) -> bool {
    matches!((prior, path), (Density::GaussianMixture(_), PathState::Gaussian(t)) if !t.is_empty())
        && path.log_mass().is_finite()
}

/// Scores `subset` against one component.
pub fn score_subset(
    lead: Lead,
    prior: &Density,
    subset: &MultiSensorSubset,
    ctx: &ScanContext<'_>,
) -> Result<ScoredSubset> {
    let mut path = PathState::from_prior(prior);
    for (i, pick) in subset.picks().iter().enumerate() {
        path = path.extend(prior, &ctx.sensors[i], pick.map(|l| ctx.measurement(i, l)), &ctx.ut)?;
    }
    scored_from_path(lead, prior, subset.clone(), &path)
}
