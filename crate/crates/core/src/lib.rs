//! Multi-sensor multi-target tracking with random finite sets.
//!
//! The main filter is a multi-sensor multi-Bernoulli (MS-MeMBer) filter
//! whose update considers only a greedily selected set of multi-sensor
//! measurement subsets per component and of quasi-partitions overall. A
//! truncated multi-sensor CPHD filter is provided as a baseline, along with
//! linear and Doppler-bearing sensor models, OSPA evaluation and a seeded
//! Monte Carlo driver.
//!
//! ```no_run
//! use msmember::bench::{run_single, FilterKind};
//! use msmember::models::{build_scenario, ScenarioConfig};
//!
//! let scenario = build_scenario(&ScenarioConfig::linear_default(), 7).unwrap();
//! let run = run_single(&scenario, FilterKind::MsMember, 7, 0, false).unwrap();
//! println!("time-averaged OSPA: {:.2}", run.time_averaged_ospa());
//! ```

pub mod bench;
pub mod error;
pub mod estimation;
pub mod member;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod rfs;
pub mod seeding;
pub mod tcphd;

pub use error::{Error, Result};
