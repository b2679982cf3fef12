//! Density zoo, averaged-ISE experiments, the pointwise normal-limit check
//! and the update-cost benchmark.

mod bench;
mod clt;
mod harness;
mod zoo;

pub use bench::{bench_update, BenchReport, BENCH_BLOCKS};
pub use clt::{anderson_darling_normal, clt_check, CltReport, MIN_REPLICATES};
pub use harness::{
    convergence_slope, derive_seed, ise, ise_values, log_log_slope, reports_to_csv,
    reports_to_markdown, run_cell, run_table, trial_seed, EstimatorSpec, TableConfig, TrialReport,
};
pub use zoo::{sample_zoo, ZooDensity, ZooId};
