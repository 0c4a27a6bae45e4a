// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte Carlo harness, empirical distributions and the reference experiments.

mod counterexample;
mod ecdf;
mod experiments;
mod harness;
mod output;
mod theorem1;

pub use counterexample::{
    counterexample_study, counterexample_trial, CounterexampleConfig, CounterexampleRecord, CounterexampleReport,
};
pub use ecdf::{ks_distance, Ecdf};
pub use experiments::{
    cp_weak_convergence, rate_study, CpWeakConvergence, CpWeakConvergenceConfig, KsRow, RateRow,
    RateStudy, RateStudyConfig,
};
pub use harness::{run_replications, ExperimentConfig, ReplicationFailure, Replicated};
pub use output::{
    CounterexampleSummary, CpSummary, Emit, KsSummaryRow, RateSummary, RateSummaryRow,
};
pub use theorem1::{theorem1_suite, Theorem1Report, Theorem1Row};
