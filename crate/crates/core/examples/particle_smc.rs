//! Sequential Monte Carlo implementation: every Bernoulli density is a
//! weighted particle set. Runs the first 40 scans of the nonlinear scenario.
//!
//! cargo run --release --example particle_smc -- 400

use msmember::member::{FilterModels, MsMemberFilter};
use msmember::metrics::{ospa, OspaParams};
use msmember::models::{build_scenario, Implementation, ScenarioConfig};
use msmember::seeding::{stream_rng, Stream};

fn main() -> msmember::Result<()> {
    let particles: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let mut config = ScenarioConfig::nonlinear_default();
    config.filter.implementation = Implementation::Particle;
    config.filter.particles = particles;
    let scenario = build_scenario(&config, 1)?;
    let models = FilterModels {
        motion: scenario.motion.clone(),
        sensors: scenario.sensors.clone(),
        birth: scenario.birth.clone(),
    };
    let mut filter = MsMemberFilter::new(models, config.filter.member_params())?;
    let mut rng = stream_rng(1, 0, Stream::Filter);
    let params = OspaParams::default();

    for meas in scenario.simulate_run(1, 0)?.into_iter().take(40) {
        let diag = filter.step(&meas, &mut rng)?;
        if meas.scan % 5 == 4 {
            let truth = scenario.truth.states_at(meas.scan);
            let est = filter.estimates();
            println!(
                "scan {:2}: {} components, {} estimated / {} true, OSPA {:6.2}, {:.0} ms",
                meas.scan,
                diag.updated_components,
                est.len(),
                truth.len(),
                ospa(&est, &truth, &params),
                diag.elapsed.as_secs_f64() * 1e3
            );
        }
    }
    Ok(())
}
