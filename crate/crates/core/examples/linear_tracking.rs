//! Tracks the default linear scenario (three position sensors, pD = 0.5,
//! five clutter points per scan) with one MS-MeMBer filter run.
//!
//! cargo run --release --example linear_tracking

use msmember::member::{FilterModels, MsMemberFilter};
use msmember::metrics::{ospa, OspaParams};
use msmember::models::{build_scenario, ScenarioConfig};
use msmember::seeding::{stream_rng, Stream};

fn main() -> msmember::Result<()> {
    let config = ScenarioConfig::linear_default();
    let scenario = build_scenario(&config, 0)?;
    let models = FilterModels {
        motion: scenario.motion.clone(),
        sensors: scenario.sensors.clone(),
        birth: scenario.birth.clone(),
    };
    let mut filter = MsMemberFilter::new(models, config.filter.member_params())?;
    let mut rng = stream_rng(0, 0, Stream::Filter);
    let params = OspaParams::default();
    let mut total = 0.0;

    println!("scan  meas  true  est   ospa");
    for meas in scenario.simulate_run(0, 0)? {
        filter.step(&meas, &mut rng)?;
        let est = filter.estimates();
        let truth = scenario.truth.states_at(meas.scan);
        let d = ospa(&est, &truth, &params);
        total += d;
        if meas.scan % 10 == 9 {
            println!("{:4}  {:4}  {:4}  {:3}  {:6.2}", meas.scan, meas.total(), truth.len(), est.len(), d);
        }
    }
    println!("time-averaged OSPA: {:.3} m", total / config.num_scans as f64);
    Ok(())
}
