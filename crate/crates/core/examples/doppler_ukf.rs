//! Bearing/Doppler tracking with the unscented Gaussian implementation on
//! the five-sensor nonlinear scenario. Prints the estimated positions next
//! to the truth every 20 scans.
//!
//! cargo run --release --example doppler_ukf -- 0.9

use msmember::bench::{apply_sweep, SweepAxis};
use msmember::member::{FilterModels, MsMemberFilter};
use msmember::metrics::{ospa, OspaParams};
use msmember::models::{build_scenario, ScenarioConfig};
use msmember::seeding::{stream_rng, Stream};

fn main() -> msmember::Result<()> {
    let pd: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.9);
    let config = apply_sweep(&ScenarioConfig::nonlinear_default(), SweepAxis::DetectionProbability, pd)?;
    let scenario = build_scenario(&config, 3)?;
    let models = FilterModels {
        motion: scenario.motion.clone(),
        sensors: scenario.sensors.clone(),
        birth: scenario.birth.clone(),
    };
    let mut filter = MsMemberFilter::new(models, config.filter.member_params())?;
    let mut rng = stream_rng(3, 0, Stream::Filter);
    let params = OspaParams::default();

    for meas in scenario.simulate_run(3, 0)? {
        let diag = filter.step(&meas, &mut rng)?;
        if meas.scan % 20 != 19 {
            continue;
        }
        let est = filter.estimates();
        let truth = scenario.truth.states_at(meas.scan);
        println!(
            "scan {} ({} partitions, {:.1} ms): OSPA {:.2}",
            meas.scan,
            diag.partitions,
            diag.elapsed.as_secs_f64() * 1e3,
            ospa(&est, &truth, &params)
        );
        for x in &truth {
            println!("  truth    ({:7.1}, {:7.1})", x[0], x[1]);
        }
        for x in &est {
            println!("  estimate ({:7.1}, {:7.1})", x[0], x[1]);
        }
    }
    Ok(())
}
