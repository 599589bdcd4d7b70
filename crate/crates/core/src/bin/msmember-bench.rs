use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use msmember::bench::{run_benchmark, sweep, FilterKind, RunConfig, SweepAxis};
use msmember::models::ScenarioConfig;

/// Monte Carlo benchmark for multi-sensor multi-target filters.
#[derive(Parser)]
#[command(name = "msmember-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo batch.
    Run(Common),
    /// Run one batch per value of a scenario parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: s, pd or clutter.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file. Defaults to the built-in linear scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// ms-member or ms-tcphd.
    #[arg(long, default_value = "ms-member")]
    filter: FilterKind,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write 0 in the scan_ms column so outputs are reproducible bytewise.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn run_config(&self) -> msmember::Result<RunConfig> {
        let scenario = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::linear_default(),
        };
        Ok(RunConfig {
            scenario,
            filter: self.filter,
            mc_runs: self.runs,
            master_seed: self.seed,
            out_dir: self.out.clone(),
            jobs: self.jobs,
            timing: !self.no_timing,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(common) => common.run_config().and_then(|cfg| {
            let out = run_benchmark(&cfg)?;
            let r = &out.row;
            println!(
                "{} s={} pD={} lambda_c={}: median OSPA {:.3} (Q1 {:.3}, Q3 {:.3}), {:.3} ms/scan",
                r.filter, r.s, r.pd, r.lambda_c, r.median, r.q1, r.q3, r.mean_scan_ms
            );
            Ok(())
        }),
        Command::Sweep { common, axis, values } => common.run_config().and_then(|cfg| {
            for r in sweep(&cfg, axis, &values)? {
                println!(
                    "{} s={} pD={} lambda_c={}: median OSPA {:.3} (Q1 {:.3}, Q3 {:.3}), {:.3} ms/scan",
                    r.filter, r.s, r.pd, r.lambda_c, r.median, r.q1, r.q3, r.mean_scan_ms
                );
            }
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
