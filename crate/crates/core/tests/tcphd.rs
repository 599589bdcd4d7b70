mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{linear_sensor, random_instance};
use msmember::estimation::UnscentedParams;
use msmember::member::{associate, greedy_subsets, FilterModels, Lead, ScanContext};
use msmember::models::{build_scenario, BirthModel, Measurement, MeasurementSet, MotionModel, ScenarioConfig};
use msmember::rfs::{Density, StateCov, StateVector};
use msmember::tcphd::{
    tcphd_partitions, tcphd_predict, tcphd_score, tcphd_update, IidClusterState, TcphdFilter, TcphdParams,
};

fn state_from(inst: &common::Instance) -> IidClusterState {
    let comps: Vec<(f64, Density)> = inst.predicted.components.iter().map(|b| (b.r, b.pdf.clone())).collect();
    let mut cardinality = vec![0.0; 21];
    cardinality[comps.len().min(20)] = 0.5;
    cardinality[comps.len().saturating_sub(1)] += 0.3;
    cardinality[comps.len() + 1] += 0.2;
    IidClusterState { components: comps, cardinality }
}

#[test]
fn no_measurements_leaves_only_missed_terms() {
    let inst = random_instance(3, &[0, 0], 2);
    let state = state_from(&inst);
    let ctx = ScanContext::new(&inst.sensors, &inst.meas, UnscentedParams::default()).unwrap();
    let subsets = tcphd_score(&state, &ctx, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let params = TcphdParams { prune: 0.0, merge_threshold: 0.0, ..TcphdParams::default() };
    let (out, parts) = tcphd_update(&state, &subsets, &ctx, &params, &mut rng).unwrap();
    assert_eq!(parts, 1);
    assert_eq!(out.components.len(), 2);
    for ((_, a), (_, b)) in out.components.iter().zip(&state.components) {
        assert_eq!(a, b);
    }
    // weights keep their proportions
    let ratio_out = out.components[0].0 / out.components[1].0;
    let ratio_in = state.components[0].0 / state.components[1].0;
    assert!((ratio_out - ratio_in).abs() < 1e-12);
}

#[test]
fn certain_detection_concentrates_on_conjugate_posterior() {
    let sensors = vec![linear_sensor(5.0, 1.0, 0.0)];
    let meas = MeasurementSet { scan: 0, per_sensor: vec![vec![Measurement::new(8.0, -4.0)]] };
    let ctx = ScanContext::new(&sensors, &meas, UnscentedParams::default()).unwrap();
    let pdf = Density::gaussian(StateVector::zeros(), StateCov::identity() * 20.0).unwrap();
    let mut cardinality = vec![0.0; 21];
    cardinality[1] = 1.0;
    let state = IidClusterState { components: vec![(1.0, pdf)], cardinality };
    let subsets = tcphd_score(&state, &ctx, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (out, _) = tcphd_update(&state, &subsets, &ctx, &TcphdParams::default(), &mut rng).unwrap();
    assert!((out.phd_mass() - 1.0).abs() < 1e-12);
    assert_eq!(out.components.len(), 1);
    let m = out.components[0].1.mean();
    assert!((m[0] - 8.0 * 20.0 / 45.0).abs() < 1e-9);
    assert!((m[1] + 4.0 * 20.0 / 45.0).abs() < 1e-9);
    assert!((out.cardinality[1] - 1.0).abs() < 1e-12);
}

#[test]
fn partition_weights_and_cardinality_are_normalized() {
    for seed in 0..20 {
        let inst = random_instance(seed, &[2, 3, 1], 3);
        let state = state_from(&inst);
        let ctx = ScanContext::new(&inst.sensors, &inst.meas, UnscentedParams::default()).unwrap();
        let subsets = tcphd_score(&state, &ctx, 4).unwrap();
        let (parts, card) = tcphd_partitions(&state, &subsets, &ctx, 4).unwrap();
        let total: f64 = parts.iter().map(|p| p.alpha).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((card.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(card.iter().all(|&p| p >= 0.0));
    }
}

#[test]
fn single_component_is_not_affected_by_truncation() {
    let inst = random_instance(5, &[2, 2], 1);
    let state = state_from(&inst);
    let ctx = ScanContext::new(&inst.sensors, &inst.meas, UnscentedParams::default()).unwrap();
    let subsets = tcphd_score(&state, &ctx, usize::MAX).unwrap();
    let n = subsets[0].len();
    let (a, ca) = tcphd_partitions(&state, &subsets, &ctx, n).unwrap();
    let (b, cb) = tcphd_partitions(&state, &subsets, &ctx, usize::MAX).unwrap();
    assert_eq!(a.len(), n);
    assert_eq!(a, b);
    assert_eq!(ca, cb);
}

#[test]
fn subset_ranking_shared_with_member() {
    let inst = random_instance(8, &[3, 2], 2);
    let ctx = ScanContext::new(&inst.sensors, &inst.meas, UnscentedParams::default()).unwrap();
    let state = state_from(&inst);
    let tc = tcphd_score(&state, &ctx, 4).unwrap();
    let (mb, _) = associate(&inst.predicted, &ctx, 4, 4).unwrap();
    for (a, b) in tc.iter().zip(&mb) {
        let pa: Vec<_> = a.iter().map(|s| s.subset.clone()).collect();
        let pb: Vec<_> = b.iter().map(|s| s.subset.clone()).collect();
        assert_eq!(pa, pb);
        for (x, y) in a.iter().zip(b).skip(1) {
            assert!((x.log_beta - y.log_beta).abs() < 1e-12);
        }
    }
    let zero = greedy_subsets(Lead::Intensity(0.0), &inst.predicted.components[0].pdf, &ctx, 4).unwrap();
    assert_eq!(zero.len(), 1);
}

#[test]
fn cardinality_stays_consistent_over_a_run() {
    let scenario = build_scenario(&ScenarioConfig::linear_default(), 1).unwrap();
    let models = FilterModels {
        motion: scenario.motion.clone(),
        sensors: scenario.sensors.clone(),
        birth: scenario.birth.clone(),
    };
    let mut filter = TcphdFilter::new(models, TcphdParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for meas in scenario.simulate_run(1, 0).unwrap().iter().take(40) {
        filter.step(meas, &mut rng).unwrap();
        let s = &filter.state;
        assert!((s.cardinality.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((s.phd_mass() - s.mean_cardinality()).abs() < 1e-6);
    }
    let est = filter.estimates().len() as i64;
    assert!((est - scenario.truth.cardinality(39) as i64).abs() <= 1);
}

#[test]
fn prediction_with_unit_survival_and_no_birth() {
    let motion = MotionModel::new(1.0, 1.0, 1.0).unwrap();
    let pdf = Density::gaussian(StateVector::new(1.0, 1.0, 1.0, 0.0), StateCov::identity()).unwrap();
    let state = IidClusterState { components: vec![(0.8, pdf)], cardinality: vec![0.2, 0.8, 0.0] };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = tcphd_predict(&state, &motion, &BirthModel { components: vec![] }, None, &mut rng).unwrap();
    assert_eq!(out.cardinality, state.cardinality);
    assert_eq!(out.components[0].0, 0.8);
    assert_eq!(out.components[0].1.mean(), StateVector::new(2.0, 1.0, 1.0, 0.0));
}
