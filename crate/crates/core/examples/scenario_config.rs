//! Prints a built-in scenario as TOML, or validates a scenario file.
//!
//! cargo run --example scenario_config -- linear > my.toml
//! cargo run --example scenario_config -- check my.toml

use std::path::Path;

use msmember::models::{build_scenario, ScenarioConfig};

fn main() -> msmember::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("check") => {
            let path = args.get(1).expect("usage: scenario_config check <file>");
            let cfg = ScenarioConfig::from_file(Path::new(path))?;
            let sc = build_scenario(&cfg, 0)?;
            let peak = (0..sc.truth.num_scans).map(|k| sc.truth.cardinality(k)).max().unwrap_or(0);
            println!(
                "{path}: {} scans, {} sensors, {} tracks (at most {peak} at once), events at {:?}",
                cfg.num_scans,
                cfg.sensors.len(),
                cfg.tracks.len(),
                sc.truth.event_scans()
            );
        }
        Some("nonlinear") => print!("{}", ScenarioConfig::nonlinear_default().to_toml_string()),
        _ => print!("{}", ScenarioConfig::linear_default().to_toml_string()),
    }
    Ok(())
}
