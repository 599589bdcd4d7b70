//! Multi-sensor multi-Bernoulli filter: subset scoring, greedy subset and
//! quasi-partition selection, and the multi-Bernoulli update.

pub mod filter;
pub mod greedy;
pub mod scoring;
pub mod subset;
pub mod update;

pub use filter::{associate, step, step_traced, FilterModels, FilterParams, MsMemberFilter, ScanTrace, StepDiagnostics};
pub use greedy::{clutter_term, greedy_partitions, greedy_subsets, select_partition_paths, QuasiPartition};
pub use scoring::{gamma, ms_likelihood_f, score_subset, sequential_subset_update, Lead, ScanContext};
pub use subset::{MultiSensorSubset, ScoredSubset};
pub use update::{emit_components, estimate, predict, predict_density, to_particles, update};
