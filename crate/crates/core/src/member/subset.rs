use std::fmt;

use crate::rfs::Density;

/// At most one measurement per sensor: `picks[i] = Some(l)` assigns the
/// `l`-th measurement of sensor `i`, `None` is a missed detection.
///
/// Two subsets with equal picks are the same subset, so the value itself
/// serves as the canonical identifier (it is `Eq + Hash + Ord`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiSensorSubset {
    picks: Vec<Option<usize>>,
}

impl MultiSensorSubset {
    /// The all-empty subset over `sensors` sensors.
    pub fn empty(sensors: usize) -> Self {
        Self { picks: vec![None; sensors] }
    }

    pub fn from_picks(picks: Vec<Option<usize>>) -> Self {
        Self { picks }
    }

    pub fn picks(&self) -> &[Option<usize>] {
        &self.picks
    }

    pub fn num_sensors(&self) -> usize {
        self.picks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.picks.iter().all(Option::is_none)
    }

    /// `(sensor, measurement)` pairs of the subset.
    pub fn detections(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.picks.iter().enumerate().filter_map(|(i, p)| p.map(|l| (i, l)))
    }

    pub fn num_detections(&self) -> usize {
        self.picks.iter().filter(|p| p.is_some()).count()
    }

    /// True if both subsets use the same measurement of some sensor.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.picks
            .iter()
            .zip(&other.picks)
            .any(|(a, b)| a.is_some() && a == b)
    }

    pub(crate) fn with_pick(&self, sensor: usize, pick: Option<usize>) -> Self {
        let mut picks = self.picks.clone();
        picks[sensor] = pick;
        Self { picks }
    }

    /// Text form such as `0:-,1:3,2:0`.
    pub fn canonical_id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiSensorSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.picks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match p {
                Some(l) => write!(f, "{i}:{l}")?,
                None => write!(f, "{i}:-")?,
            }
        }
        Ok(())
    }
}

/// A multi-sensor subset scored against one predicted component.
#[derive(Clone, Debug)]
pub struct ScoredSubset {
    pub subset: MultiSensorSubset,
    /// Log of the association score (`-inf` when impossible).
    pub log_beta: f64,
    /// `ln ∫ p(x) f(W | x) dx`; for the empty subset this is `ln ⟨p, γ⟩`.
    pub log_mass: f64,
    /// Subset-conditioned density, present whenever `log_mass` is finite.
    pub posterior: Option<Density>,
}
