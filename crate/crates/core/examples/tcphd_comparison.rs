//! MS-MeMBer against the truncated multi-sensor CPHD filter on the same
//! measurements, for a few detection probabilities of the nonlinear
//! scenario. Reports median time-averaged OSPA over a small batch.
//!
//! cargo run --release --example tcphd_comparison -- 8

use msmember::bench::{apply_sweep, simulate_benchmark, FilterKind, RunConfig, SweepAxis};
use msmember::models::ScenarioConfig;

fn main() -> msmember::Result<()> {
    let runs: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    println!("  pD   ms-member   ms-tcphd");
    for pd in [0.3, 0.5, 0.9] {
        let scenario = apply_sweep(&ScenarioConfig::nonlinear_default(), SweepAxis::DetectionProbability, pd)?;
        let mut medians = Vec::new();
        for filter in [FilterKind::MsMember, FilterKind::MsTcphd] {
            let config = RunConfig {
                scenario: scenario.clone(),
                filter,
                mc_runs: runs,
                master_seed: 0,
                out_dir: Default::default(),
                jobs,
                timing: true,
            };
            medians.push(simulate_benchmark(&config)?.summary.median);
        }
        println!("{pd:5.1}  {:10.3}  {:9.3}", medians[0], medians[1]);
    }
    Ok(())
}
