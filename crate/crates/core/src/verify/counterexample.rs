// SPDX-License-Identifier: MIT OR Apache-2.0

//! Convergence of processes without convergence of their pure jump parts.
//!
//! `Psi_0 = -Psi` for a two-sided Poisson counting path `Psi`, and
//! `Psi_n = Psi_0 + (1/n) 1[T_{-1}/2, T_1/2)`. The processes converge in the
//! Skorohod sense while the maximizers stay at half of the limit's.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::processes::{CompoundPoissonSpec, CppPath, JumpLaw};
use crate::rng::SimRng;
use crate::sargmax::{largmax_step, sargmax_step};
use crate::skorohod::{skorohod_dist_1d, Interval, StepFn1D};
use crate::verify::harness::{run_replications, ExperimentConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub path: usize,
    pub n: usize,
    pub t_minus1: f64,
    pub t_plus1: f64,
    pub sargmax_psi_n: f64,
    pub largmax_psi_n: f64,
    pub sargmax_psi0: f64,
    pub largmax_psi0: f64,
    pub skorohod_dist: f64,
    /// `1/n`, the sup distance under the identity warp.
    pub dist_bound: f64,
    pub pure_jump_dist: f64,
    pub half_relation: bool,
    pub dist_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub records: Vec<CounterexampleRecord>,
    pub all_half_relations: bool,
    pub all_dist_bounds: bool,
    /// Smallest pure-jump distance over all paths and `n`.
    pub min_pure_jump_dist: f64,
    /// Every path keeps a positive pure-jump distance for all `n`.
    pub pure_jump_bounded_below: bool,
}

impl CounterexampleReport {
    fn from_records(records: Vec<CounterexampleRecord>) -> Self {
        let min_pure_jump_dist = records
            .iter()
            .map(|r| r.pure_jump_dist)
            .fold(f64::INFINITY, f64::min);
        Self {
            all_half_relations: records.iter().all(|r| r.half_relation),
            all_dist_bounds: records.iter().all(|r| r.dist_ok),
            pure_jump_bounded_below: min_pure_jump_dist > 0.0,
            min_pure_jump_dist,
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.all_half_relations && self.all_dist_bounds && self.pure_jump_bounded_below
    }
}

fn path_records(path: usize, rate: f64, n_values: &[usize], rng: &mut SimRng) -> Result<Vec<CounterexampleRecord>> {
    let spec = CompoundPoissonSpec::new(
        rate,
        rate,
        JumpLaw::PointMass { v: -1.0 },
        JumpLaw::PointMass { v: -1.0 },
    )?;
    let mut cpp = CppPath::new(&spec, rng);
    cpp.reveal_events(1);
    let t_plus1 = cpp.right_times()[0];
    let t_minus1 = -cpp.left_times()[0];
    let horizon = 2.0 * t_plus1.max(-t_minus1);
    let domain = Interval::new(-horizon, horizon)?;
    let psi0 = cpp.window(domain)?;
    let (s0, l0) = (sargmax_step(&psi0), largmax_step(&psi0));
    let pj0 = psi0.pure_jump()?;
    let mut out = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let bump = 1.0 / n as f64;
        let indicator = StepFn1D::new(domain, vec![0.5 * t_minus1, 0.5 * t_plus1], vec![0.0, bump, 0.0])?;
        let psi_n = psi0.add(&indicator)?;
        let (s, l) = (sargmax_step(&psi_n), largmax_step(&psi_n));
        let skorohod_dist = skorohod_dist_1d(&psi_n, &psi0)?;
        let pure_jump_dist = psi_n.pure_jump()?.distance(&pj0)?;
        out.push(CounterexampleRecord {
            path,
            n,
            t_minus1,
            t_plus1,
            sargmax_psi_n: s,
            largmax_psi_n: l,
            sargmax_psi0: s0,
            largmax_psi0: l0,
            skorohod_dist,
            dist_bound: bump,
            pure_jump_dist,
            half_relation: s == 0.5 * s0 && l == 0.5 * l0,
            dist_ok: skorohod_dist <= bump,
        });
    }
    Ok(out)
}

fn check_args(rate: f64, n_values: &[usize]) -> Result<()> {
    ensure!(rate.is_finite() && rate > 0.0, "rate must be positive");
    ensure!(
        !n_values.is_empty() && n_values.iter().all(|&n| n >= 1),
        "n values must be a nonempty list of positive integers"
    );
    Ok(())
}

/// One path, every `n`.
pub fn counterexample_trial(rate: f64, n_values: &[usize], rng: &mut SimRng) -> Result<CounterexampleReport> {
    check_args(rate, n_values)?;
    Ok(CounterexampleReport::from_records(path_records(0, rate, n_values, rng)?))
}

/// `config.replications` independent paths; records are ordered by path, then `n`.
pub fn counterexample_study(rate: f64, n_values: &[usize], config: &ExperimentConfig) -> Result<CounterexampleReport> {
    check_args(rate, n_values)?;
    let runs = run_replications(config, |r, rng| path_records(r, rate, n_values, rng))?;
    Ok(CounterexampleReport::from_records(
        runs.samples.into_iter().flat_map(|(_, v)| v).collect(),
    ))
}

/// Inputs of [`counterexample_study`] as read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub rate: f64,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub threads: usize,
}

impl CounterexampleConfig {
    pub fn run(&self) -> Result<CounterexampleReport> {
        let cfg = ExperimentConfig {
            master_seed: self.master_seed,
            replications: self.replications,
            threads: self.threads,
        };
        counterexample_study(self.rate, &self.n_values, &cfg)
    }
}
