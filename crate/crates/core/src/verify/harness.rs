// SPDX-License-Identifier: MIT OR Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::{mix_seed, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub replications: usize,
    /// Worker threads; 0 lets the pool decide. Never affects results.
    #[serde(default)]
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationFailure {
    pub index: usize,
    pub message: String,
}

/// Outcomes in replication order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replicated<S> {
    /// `(replication index, sample)` for every success, ascending in index.
    pub samples: Vec<(usize, S)>,
    pub failures: Vec<ReplicationFailure>,
}

impl<S> Replicated<S> {
    pub fn values(&self) -> impl Iterator<Item = &S> {
        self.samples.iter().map(|(_, s)| s)
    }
}

/// Runs `task(r, rng_r)` for `r = 0..replications` with `rng_r` seeded by
/// `mix_seed(master_seed, r)`.
///
/// Output depends only on the config, never on scheduling. Fails when more
/// than 1% of the replications fail.
pub fn run_replications<S, F>(config: &ExperimentConfig, task: F) -> Result<Replicated<S>>
where
    S: Send,
    F: Fn(usize, &mut SimRng) -> Result<S> + Sync,
{
    ensure!(config.replications >= 1, "need at least one replication");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<S>> = pool.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = SimRng::seed_from(mix_seed(config.master_seed, r as u64));
                task(r, &mut rng)
            })
            .collect()
    });
    let mut samples = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (index, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(s) => samples.push((index, s)),
            Err(e) => failures.push(ReplicationFailure {
                index,
                message: e.to_string(),
            }),
        }
    }
    if failures.len() * 100 > config.replications {
        return Err(Error::Replications {
            failed: failures.len(),
            total: config.replications,
            first: failures[0].message.clone(),
        });
    }
    Ok(Replicated { samples, failures })
}
