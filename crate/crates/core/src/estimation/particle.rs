use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::rfs::ParticleDensity;

/// Reweights by per-particle likelihood values `f_n ≥ 0`.
///
/// Returns the normalized posterior and `ln Σ w_n f_n`.
pub fn particle_reweight(p: &ParticleDensity, f_values: &[f64]) -> Result<(ParticleDensity, f64)> {
    let log_f: Vec<f64> = f_values.iter().map(|f| f.ln()).collect();
    particle_reweight_log(p, &log_f)
}

/// Same as [`particle_reweight`] with likelihoods given in the log domain.
pub fn particle_reweight_log(p: &ParticleDensity, log_f: &[f64]) -> Result<(ParticleDensity, f64)> {
    if log_f.len() != p.len() {
        return Err(Error::Dimension(format!("{} likelihoods for {} particles", log_f.len(), p.len())));
    }
    let log_w: Vec<f64> = p.weights().iter().zip(log_f).map(|(w, lf)| w.ln() + lf).collect();
    let log_mass = log_sum_exp(&log_w);
    if !log_mass.is_finite() {
        return Err(Error::EmptyLikelihood);
    }
    let weights = log_w.iter().map(|lw| (lw - log_mass).exp()).collect();
    Ok((ParticleDensity::new(weights, p.states().to_vec())?, log_mass))
}

/// Systematic resampling to `n_out` equally weighted particles.
pub fn resample<R: Rng + ?Sized>(p: &ParticleDensity, n_out: usize, rng: &mut R) -> ParticleDensity {
    let offset: f64 = rng.random::<f64>();
    let states = systematic_indices(p.weights(), n_out, offset)
        .into_iter()
        .map(|i| p.states()[i])
        .collect();
    ParticleDensity::uniform(states).expect("resampled set is non-empty")
}

/// Indices chosen by systematic resampling with the given `U[0,1)` offset.
pub fn systematic_indices(weights: &[f64], n_out: usize, offset: f64) -> Vec<usize> {
    let mut out = Vec::with_capacity(n_out);
    let step = 1.0 / n_out as f64;
    let mut cumulative = weights.first().copied().unwrap_or(0.0);
    let mut i = 0;
    for k in 0..n_out {
        let u = (k as f64 + offset) * step;
        while u > cumulative && i + 1 < weights.len() {
            i += 1;
            cumulative += weights[i];
        }
        out.push(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfs::StateVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn states(n: usize) -> Vec<StateVector> {
        (0..n).map(|i| StateVector::repeat(i as f64)).collect()
    }

    #[test]
    fn unit_likelihood_is_identity() {
        let p = ParticleDensity::new(vec![0.2, 0.3, 0.5], states(3)).unwrap();
        let (q, log_mass) = particle_reweight(&p, &[1.0, 1.0, 1.0]).unwrap();
        assert!(log_mass.abs() < 1e-15);
        for (a, b) in p.weights().iter().zip(q.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_supported_particle_becomes_degenerate() {
        let p = ParticleDensity::uniform(states(4)).unwrap();
        let (q, _) = particle_reweight(&p, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(q.weights(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn reweight_arithmetic() {
        let p = ParticleDensity::uniform(states(2)).unwrap();
        let (q, log_mass) = particle_reweight(&p, &[1.0, 3.0]).unwrap();
        assert!((q.weights()[0] - 0.25).abs() < 1e-15);
        assert!((q.weights()[1] - 0.75).abs() < 1e-15);
        assert!((log_mass.exp() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn all_zero_likelihood_is_error() {
        let p = ParticleDensity::uniform(states(2)).unwrap();
        assert!(matches!(particle_reweight(&p, &[0.0, 0.0]), Err(Error::EmptyLikelihood)));
    }

    #[test]
    fn resample_single_particle() {
        let p = ParticleDensity::uniform(states(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = resample(&p, 10, &mut rng);
        assert_eq!(q.len(), 10);
        assert!(q.states().iter().all(|s| *s == p.states()[0]));
    }

    #[test]
    fn systematic_counts_are_within_one_of_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let offset: f64 = rng.random();
            let idx = systematic_indices(&[0.5, 0.5], 1000, offset);
            let zeros = idx.iter().filter(|&&i| i == 0).count() as i64;
            assert!((zeros - 500).abs() <= 1, "count {zeros}");
        }
        // Uneven weights: each count within one of n * w_i.
        let w = [0.1, 0.25, 0.05, 0.6];
        for _ in 0..200 {
            let idx = systematic_indices(&w, 333, rng.random());
            for (i, wi) in w.iter().enumerate() {
                let c = idx.iter().filter(|&&k| k == i).count() as f64;
                assert!((c - 333.0 * wi).abs() < 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn double_resampling_preserves_first_moment() {
        // Mean of the resampled particle mean over many trials matches the
        // weighted mean within 3 standard errors.
        let p = ParticleDensity::new(vec![0.1, 0.2, 0.3, 0.4], states(4)).unwrap();
        let target = p.mean()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 10_000;
        let (mut once, mut twice) = (Vec::with_capacity(trials), Vec::with_capacity(trials));
        for _ in 0..trials {
            let a = resample(&p, 10, &mut rng);
            once.push(a.mean()[0]);
            twice.push(resample(&a, 10, &mut rng).mean()[0]);
        }
        for samples in [&once, &twice] {
            let mean = samples.iter().sum::<f64>() / trials as f64;
            let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
            let se = (var / trials as f64).sqrt();
            assert!((mean - target).abs() < 3.0 * se + 1e-12, "mean {mean} target {target} se {se}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reweighting_telescopes(f in prop::collection::vec(0.01f64..10.0, 5), g in prop::collection::vec(0.01f64..10.0, 5)) {
                let p = ParticleDensity::new(vec![0.1, 0.2, 0.3, 0.15, 0.25], states(5)).unwrap();
                let (pf, mf) = particle_reweight(&p, &f).unwrap();
                let (pfg, mg) = particle_reweight(&pf, &g).unwrap();
                let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a * b).collect();
                let (direct, m) = particle_reweight(&p, &fg).unwrap();
                prop_assert!((mf + mg - m).abs() < 1e-12);
                for (a, b) in pfg.weights().iter().zip(direct.weights()) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
