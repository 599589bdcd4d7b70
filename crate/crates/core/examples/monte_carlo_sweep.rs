//! A sensor-count sweep on the linear scenario written to disk the same way
//! as the `msmember-bench sweep` subcommand.
//!
//! cargo run --release --example monte_carlo_sweep -- out/sweep_s

use std::path::PathBuf;

use msmember::bench::{sweep, FilterKind, RunConfig, SweepAxis};
use msmember::models::ScenarioConfig;

fn main() -> msmember::Result<()> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/sweep_s"));
    let config = RunConfig {
        scenario: ScenarioConfig::linear_default(),
        filter: FilterKind::MsMember,
        mc_runs: 10,
        master_seed: 42,
        out_dir: out_dir.clone(),
        jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        timing: true,
    };
    println!("  s   median     q1     q3   ms/scan");
    for row in sweep(&config, SweepAxis::Sensors, &[2.0, 3.0, 4.0, 5.0])? {
        println!("{:3}  {:7.3} {:6.3} {:6.3}  {:8.3}", row.s, row.median, row.q1, row.q3, row.mean_scan_ms);
    }
    println!("results in {}", out_dir.display());
    Ok(())
}
