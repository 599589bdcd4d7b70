//! One scan of the association stage on a hand-built two-target, two-sensor
//! problem: the ranked multi-sensor subsets per component, the retained
//! quasi-partitions and the updated existence probabilities.

use msmember::estimation::UnscentedParams;
use msmember::member::{associate, update, ScanContext};
use msmember::models::{LinearSensor, Measurement, MeasurementSet, Rect, Sensor};
use msmember::rfs::{Bernoulli, Density, MultiBernoulli, StateCov, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> msmember::Result<()> {
    let region = Rect::centered_square(2000.0);
    let sensors = vec![
        Sensor::Linear(LinearSensor::position(10.0, 0.8, 2.0, region)),
        Sensor::Linear(LinearSensor::position(10.0, 0.8, 2.0, region)),
    ];
    let meas = MeasurementSet {
        scan: 0,
        per_sensor: vec![
            vec![Measurement::new(2.0, 1.0), Measurement::new(58.0, -3.0), Measurement::new(-600.0, 300.0)],
            vec![Measurement::new(-4.0, 3.0), Measurement::new(520.0, 80.0)],
        ],
    };
    let cov = StateCov::from_diagonal(&StateVector::new(100.0, 100.0, 4.0, 4.0));
    let predicted = MultiBernoulli::new(vec![
        Bernoulli::new(0.9, Density::gaussian(StateVector::new(0.0, 0.0, 1.0, 0.0), cov)?)?,
        Bernoulli::new(0.6, Density::gaussian(StateVector::new(55.0, 0.0, -1.0, 0.0), cov)?)?,
    ]);

    let ctx = ScanContext::new(&sensors, &meas, UnscentedParams::default())?;
    let (subsets, partitions) = associate(&predicted, &ctx, 4, 4)?;
    for (j, list) in subsets.iter().enumerate() {
        println!("component {j}:");
        for s in list {
            println!("  {:<12} ln beta {:8.3}", s.subset.canonical_id(), s.log_beta);
        }
    }
    for p in &partitions {
        let ids: Vec<String> = p.assigned(&subsets).map(|s| s.subset.canonical_id()).collect();
        println!("partition alpha {:.4}: {}", p.alpha, ids.join(" | "));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let updated = update(&predicted, &subsets, &partitions, 1e-3, 4, None, &mut rng)?;
    for b in &updated.components {
        let m = b.pdf.mean();
        println!("r {:.4} at ({:.1}, {:.1})", b.r, m[0], m[1]);
    }
    Ok(())
}
