// SPDX-License-Identifier: MIT OR Apache-2.0

//! Replicated estimator studies: the change-point weak convergence check and
//! the Cox threshold rate study.
//!
//! Each sample size `n` draws its replications under the master seed
//! `mix_seed(master_seed, n)`; limit-law draws use `mix_seed(master_seed, 0)`.

use serde::{Deserialize, Serialize};

use crate::changepoint::{fit_cp, simulate_cp, ChangePointModel};
use crate::cox::{fit_cox_threshold, simulate_cox, CoxThresholdModel};
use crate::error::{ensure, Result};
use crate::processes::{derive_cp_limit_spec, sargmax_of_cpp_adaptive};
use crate::rng::mix_seed;
use crate::verify::ecdf::{ks_distance, Ecdf};
use crate::verify::harness::{run_replications, ExperimentConfig};

fn check_ns(ns: &[usize], min: usize) -> Result<()> {
    ensure!(!ns.is_empty(), "need at least one sample size");
    ensure!(
        ns.windows(2).all(|w| w[0] < w[1]),
        "sample sizes must be strictly increasing"
    );
    ensure!(ns[0] >= min, "sample sizes must be at least {min}");
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpWeakConvergenceConfig {
    pub model: ChangePointModel,
    pub ns: Vec<usize>,
    pub replications: usize,
    pub oracle_draws: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub threads: usize,
    /// Initial half-width of the limit-law window; `None` uses
    /// [`CompoundPoissonSpec::default_initial_horizon`](crate::processes::CompoundPoissonSpec::default_initial_horizon).
    #[serde(default)]
    pub initial_horizon: Option<f64>,
    #[serde(default = "default_buffer")]
    pub buffer_frac: f64,
}

fn default_buffer() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsRow {
    pub n: usize,
    /// `n (zeta_hat - zeta0)` in replication order.
    pub samples: Vec<f64>,
    pub failures: usize,
    pub ks: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CpWeakConvergence {
    /// Draws of the smallest argmax of the limiting compound Poisson process.
    pub oracle: Vec<f64>,
    pub rows: Vec<KsRow>,
}

impl CpWeakConvergence {
    /// KS never increases by more than `slack` from one `n` to the next.
    pub fn ks_monotone(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].ks <= w[0].ks + slack)
    }
}

/// ECDF of `n (zeta_hat - zeta0)` from least squares fits against the ECDF of
/// the limit law's smallest argmax, for each `n`.
pub fn cp_weak_convergence(cfg: &CpWeakConvergenceConfig) -> Result<CpWeakConvergence> {
    cfg.model.validate()?;
    check_ns(&cfg.ns, 2)?;
    ensure!(cfg.oracle_draws >= 1, "need at least one oracle draw");
    let spec = derive_cp_limit_spec(&cfg.model)?;
    let horizon = cfg.initial_horizon.unwrap_or_else(|| spec.default_initial_horizon());
    let oracle_cfg = ExperimentConfig {
        master_seed: mix_seed(cfg.master_seed, 0),
        replications: cfg.oracle_draws,
        threads: cfg.threads,
    };
    let oracle: Vec<f64> = run_replications(&oracle_cfg, |_, rng| {
        Ok(sargmax_of_cpp_adaptive(&spec, rng, horizon, cfg.buffer_frac)?.sargmax)
    })?
    .values()
    .copied()
    .collect();
    let oracle_ecdf = Ecdf::new(&oracle)?;
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let run_cfg = ExperimentConfig {
            master_seed: mix_seed(cfg.master_seed, n as u64),
            replications: cfg.replications,
            threads: cfg.threads,
        };
        let m = &cfg.model;
        let runs = run_replications(&run_cfg, |_, rng| {
            let data = simulate_cp(m, n, rng)?;
            let fit = fit_cp(&data, m.c1, m.c2)?;
            Ok(n as f64 * (fit.zeta - m.zeta0))
        })?;
        let samples: Vec<f64> = runs.values().copied().collect();
        rows.push(KsRow {
            n,
            ks: ks_distance(&Ecdf::new(&samples)?, &oracle_ecdf),
            failures: runs.failures.len(),
            samples,
        });
    }
    Ok(CpWeakConvergence { oracle, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateStudyConfig {
    pub model: CoxThresholdModel,
    pub ns: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub threads: usize,
}

/// Probabilities of the reported quantiles.
pub const RATE_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    /// `n (zeta_hat - zeta0)` of the successful fits, in replication order.
    pub samples: Vec<f64>,
    pub failures: usize,
    pub separated: usize,
    /// Type 7 quantiles at [`RATE_QUANTILES`].
    pub quantiles: [f64; 5],
    pub iqr: f64,
    /// IQR of `sqrt(n) (zeta_hat - zeta0)`.
    pub iqr_sqrt_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateStudy {
    pub rows: Vec<RateRow>,
    /// IQR at the largest `n` over IQR at the smallest.
    pub iqr_ratio: f64,
    /// The same ratio under `sqrt(n)` scaling.
    pub iqr_ratio_sqrt_n: f64,
}

/// Replicated fits of the Cox threshold estimator.
pub fn rate_study(cfg: &RateStudyConfig) -> Result<RateStudy> {
    cfg.model.validate()?;
    cfg.model.check_change_point()?;
    check_ns(&cfg.ns, 2)?;
    ensure!(cfg.replications >= 50, "the rate study needs at least 50 replications");
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let run_cfg = ExperimentConfig {
            master_seed: mix_seed(cfg.master_seed, n as u64),
            replications: cfg.replications,
            threads: cfg.threads,
        };
        let m = &cfg.model;
        let runs = run_replications(&run_cfg, |_, rng| {
            let data = simulate_cox(m, n, rng)?;
            let fit = fit_cox_threshold(&data, m.interval)?;
            Ok((fit.zeta, fit.separated))
        })?;
        let fits: Vec<(f64, bool)> = runs.values().copied().collect();
        let samples: Vec<f64> = fits.iter().map(|&(z, _)| n as f64 * (z - m.zeta0)).collect();
        let ecdf = Ecdf::new(&samples)?;
        let quantiles = RATE_QUANTILES.map(|p| ecdf.quantile(p));
        let iqr = quantiles[3] - quantiles[1];
        rows.push(RateRow {
            n,
            failures: runs.failures.len(),
            separated: fits.iter().filter(|f| f.1).count(),
            quantiles,
            iqr,
            iqr_sqrt_n: iqr / (n as f64).sqrt(),
            samples,
        });
    }
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    Ok(RateStudy {
        iqr_ratio: last.iqr / first.iqr,
        iqr_ratio_sqrt_n: last.iqr_sqrt_n / first.iqr_sqrt_n,
        rows,
    })
}
