//! Independent oracles shared by the integration tests and the acceptance
//! suite. Nothing here calls the library's scoring or update code.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use msmember::models::{LinearSensor, Measurement, MeasurementSet, Rect, Sensor};
use msmember::rfs::{Bernoulli, Density, GaussianComponent, MultiBernoulli, StateCov, StateVector};

pub type Picks = Vec<Option<usize>>;

/// A small linear multi-sensor instance.
pub struct Instance {
    pub sensors: Vec<Sensor>,
    pub meas: MeasurementSet,
    pub predicted: MultiBernoulli,
}

pub fn linear_sensor(sigma: f64, pd: f64, clutter: f64) -> Sensor {
    Sensor::Linear(LinearSensor::position(sigma, pd, clutter, Rect::centered_square(400.0)))
}

/// Random instance with `m[i]` measurements at sensor `i` scattered around
/// `comps` component means, so that many associations are plausible.
pub fn random_instance(seed: u64, m: &[usize], comps: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sensors: Vec<Sensor> = m
        .iter()
        .map(|_| linear_sensor(rng.random_range(4.0..8.0), rng.random_range(0.3..0.95), rng.random_range(0.5..3.0)))
        .collect();
    let centers: Vec<[f64; 2]> = (0..comps)
        .map(|_| [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)])
        .collect();
    let components = centers
        .iter()
        .map(|c| {
            let mean = StateVector::new(c[0], c[1], rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let a = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let spd = &a * a.transpose() * 4.0 + DMatrix::<f64>::identity(4, 4) * 30.0;
            let cov = StateCov::from_iterator(spd.iter().copied());
            let pdf = if rng.random::<f64>() < 0.5 {
                Density::gaussian(mean, cov).unwrap()
            } else {
                let shifted = mean + StateVector::new(5.0, -3.0, 0.0, 0.0);
                Density::mixture(vec![
                    GaussianComponent::new(0.7, mean, cov).unwrap(),
                    GaussianComponent::new(0.3, shifted, cov * 1.5).unwrap(),
                ])
                .unwrap()
            };
            Bernoulli::new(rng.random_range(0.2..0.95), pdf).unwrap()
        })
        .collect();
    let per_sensor = m
        .iter()
        .map(|&mi| {
            (0..mi)
                .map(|_| {
                    let c = centers[rng.random_range(0..comps)];
                    Measurement::new(c[0] + rng.random_range(-12.0..12.0), c[1] + rng.random_range(-12.0..12.0))
                })
                .collect()
        })
        .collect();
    Instance { sensors, meas: MeasurementSet { scan: 0, per_sensor }, predicted: MultiBernoulli::new(components) }
}

fn linear_parts(sensor: &Sensor) -> (f64, f64, f64, f64) {
    match sensor {
        Sensor::Linear(s) => (s.sigma, s.pd, s.clutter_rate, 1.0 / s.region.area()),
        Sensor::Doppler(_) => panic!("oracle supports linear sensors only"),
    }
}

/// `ln ∫ N(x; mean, cov) f(W|x) dx` and the posterior mean, computed in one
/// batch with the stacked measurement vector.
pub fn batch_gaussian(
    mean: &StateVector,
    cov: &StateCov,
    picks: &[Option<usize>],
    sensors: &[Sensor],
    meas: &MeasurementSet,
) -> (f64, DVector<f64>) {
    let mut log_const = 0.0;
    let mut rows: Vec<(usize, f64, Measurement)> = Vec::new();
    for (i, p) in picks.iter().enumerate() {
        let (sigma, pd, _, c) = linear_parts(&sensors[i]);
        match p {
            Some(l) => {
                log_const += pd.ln() - c.ln();
                rows.push((i, sigma, meas.per_sensor[i][*l]));
            }
            None => log_const += (1.0 - pd).ln(),
        }
    }
    let mu = DVector::from_column_slice(mean.as_slice());
    let p = DMatrix::from_column_slice(4, 4, cov.as_slice());
    if rows.is_empty() {
        return (log_const, mu);
    }
    let k = rows.len();
    let mut h = DMatrix::<f64>::zeros(2 * k, 4);
    let mut r = DMatrix::<f64>::zeros(2 * k, 2 * k);
    let mut z = DVector::<f64>::zeros(2 * k);
    for (n, (_, sigma, zm)) in rows.iter().enumerate() {
        h[(2 * n, 0)] = 1.0;
        h[(2 * n + 1, 1)] = 1.0;
        r[(2 * n, 2 * n)] = sigma * sigma;
        r[(2 * n + 1, 2 * n + 1)] = sigma * sigma;
        z[2 * n] = zm[0];
        z[2 * n + 1] = zm[1];
    }
    let s = &h * &p * h.transpose() + r;
    let innov = &z - &h * &mu;
    let chol = s.clone().cholesky().expect("innovation covariance is SPD");
    let sol = chol.solve(&innov);
    let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let log_n = -0.5 * ((2 * k) as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + innov.dot(&sol));
    let post = &mu + &p * h.transpose() * sol;
    (log_const + log_n, post)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln ∫ p f` and posterior mean for a Gaussian-mixture density.
pub fn batch_density(
    pdf: &Density,
    picks: &[Option<usize>],
    sensors: &[Sensor],
    meas: &MeasurementSet,
) -> (f64, StateVector) {
    let Density::GaussianMixture(g) = pdf else { panic!("oracle supports Gaussian mixtures only") };
    let parts: Vec<(f64, DVector<f64>)> = g
        .iter()
        .map(|c| {
            let (lm, m) = batch_gaussian(&c.mean, &c.cov, picks, sensors, meas);
            (c.weight.ln() + lm, m)
        })
        .collect();
    let lse = log_sum_exp(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let mut mean = StateVector::zeros();
    for (lw, m) in &parts {
        let w = (lw - lse).exp();
        for d in 0..4 {
            mean[d] += w * m[d];
        }
    }
    (lse, mean)
}

/// Every multi-sensor subset, all-empty first.
pub fn all_subsets(m: &[usize]) -> Vec<Picks> {
    let mut out: Vec<Picks> = vec![vec![]];
    for &mi in m {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=mi).map(move |n| {
                    let mut q = p.clone();
                    q.push(if n == 0 { None } else { Some(n - 1) });
                    q
                })
            })
            .collect();
    }
    out
}

fn overlaps(a: &Picks, b: &Picks) -> bool {
    a.iter().zip(b).any(|(x, y)| x.is_some() && x == y)
}

/// Exhaustive multi-Bernoulli update before prune/cap.
pub struct Enumerated {
    /// `(component, picks) -> (r, posterior mean)`, zero-weight entries
    /// excluded.
    pub components: HashMap<(usize, Picks), (f64, StateVector)>,
    pub alpha_sum: f64,
    pub partitions: usize,
}

/// Brute-force update over every quasi-partition of every component.
pub fn enumerate_update(inst: &Instance) -> Enumerated {
    let m = inst.meas.counts();
    let subsets = all_subsets(&m);
    let gamma: f64 = inst.sensors.iter().map(|s| 1.0 - s.pd()).product();
    // per component: (picks, ln β, ln r∫pf or ln r⟨p,γ⟩, posterior mean)
    let scored: Vec<Vec<(Picks, f64, f64, StateVector)>> = inst
        .predicted
        .components
        .iter()
        .map(|b| {
            subsets
                .iter()
                .map(|w| {
                    let (lm, mean) = batch_density(&b.pdf, w, &inst.sensors, &inst.meas);
                    if w.iter().all(Option::is_none) {
                        let beta = 1.0 - b.r + b.r * gamma;
                        (w.clone(), beta.ln(), (b.r * gamma).ln(), b.pdf.mean())
                    } else {
                        (w.clone(), b.r.ln() + lm, b.r.ln() + lm, mean)
                    }
                })
                .collect()
        })
        .collect();

    let mut partitions: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut stack: Vec<(Vec<usize>, f64)> = vec![(vec![], 0.0)];
    while let Some((choice, score)) = stack.pop() {
        let j = choice.len();
        if j == scored.len() {
            partitions.push((choice, score));
            continue;
        }
        for (l, cand) in scored[j].iter().enumerate() {
            let empty = cand.0.iter().all(Option::is_none);
            if !empty && choice.iter().enumerate().any(|(k, &c)| overlaps(&scored[k][c].0, &cand.0)) {
                continue;
            }
            let mut next = choice.clone();
            next.push(l);
            stack.push((next, score + cand.1));
        }
    }
    let log_alpha: Vec<f64> = partitions
        .iter()
        .map(|(choice, score)| {
            let mut used = vec![0usize; m.len()];
            for (j, &c) in choice.iter().enumerate() {
                for (i, p) in scored[j][c].0.iter().enumerate() {
                    if p.is_some() {
                        used[i] += 1;
                    }
                }
            }
            let clutter: f64 = (0..m.len())
                .map(|i| (m[i] - used[i]) as f64 * inst.sensors[i].clutter_rate().ln())
                .sum();
            score + clutter
        })
        .collect();
    let lse = log_sum_exp(&log_alpha);
    let mut components: HashMap<(usize, Picks), (f64, StateVector)> = HashMap::new();
    let mut alpha_sum = 0.0;
    for ((choice, _), la) in partitions.iter().zip(&log_alpha) {
        let alpha = (la - lse).exp();
        alpha_sum += alpha;
        for (j, &c) in choice.iter().enumerate() {
            let (picks, lbeta, lnum, mean) = &scored[j][c];
            let r = if picks.iter().all(Option::is_none) { alpha * (lnum - lbeta).exp() } else { alpha };
            if r > 0.0 {
                let e = components.entry((j, picks.clone())).or_insert((0.0, *mean));
                e.0 += r;
            }
        }
    }
    Enumerated { components, alpha_sum, partitions: partitions.len() }
}

/// Trapezoid integral of `f(x, y)` over a square grid.
pub fn grid_integral(center: [f64; 2], half_width: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let h = 2.0 * half_width / n as f64;
    let mut total = 0.0;
    for a in 0..=n {
        let x = center[0] - half_width + a as f64 * h;
        let wa = if a == 0 || a == n { 0.5 } else { 1.0 };
        for b in 0..=n {
            let y = center[1] - half_width + b as f64 * h;
            let wb = if b == 0 || b == n { 0.5 } else { 1.0 };
            total += wa * wb * f(x, y);
        }
    }
    total * h * h
}

/// Position marginal density of a Gaussian mixture.
pub fn position_density(pdf: &Density, x: f64, y: f64) -> f64 {
    pdf.position_pdf(x, y).expect("Gaussian mixture")
}

/// `f(W | x)` for linear sensors evaluated from position only.
pub fn linear_likelihood(picks: &[Option<usize>], sensors: &[Sensor], meas: &MeasurementSet, x: f64, y: f64) -> f64 {
    let mut f = 1.0;
    for (i, p) in picks.iter().enumerate() {
        let (sigma, pd, _, c) = linear_parts(&sensors[i]);
        match p {
            Some(l) => {
                let z = meas.per_sensor[i][*l];
                let d2 = (z[0] - x).powi(2) + (z[1] - y).powi(2);
                let h = (-0.5 * d2 / (sigma * sigma)).exp() / (2.0 * std::f64::consts::PI * sigma * sigma);
                f *= pd * h / c;
            }
            None => f *= 1.0 - pd,
        }
    }
    f
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// OSPA by enumerating every injection of the smaller set.
pub fn brute_ospa(x: &[[f64; 2]], y: &[[f64; 2]], c: f64, p: f64) -> f64 {
    let (a, b) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let (m, n) = (a.len(), b.len());
    if n == 0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for perm in permutations(n) {
        let cost: f64 = (0..m)
            .map(|i| {
                let d = ((a[i][0] - b[perm[i]][0]).powi(2) + (a[i][1] - b[perm[i]][1]).powi(2)).sqrt();
                d.min(c).powf(p)
            })
            .sum();
        best = best.min(cost);
    }
    ((best + c.powf(p) * (n - m) as f64) / n as f64).powf(1.0 / p)
}
