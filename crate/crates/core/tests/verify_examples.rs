// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use common::check_golden;
use proptest::prelude::*;
use sargmax_core::io::to_json_pretty;
use sargmax_core::verify::{
    counterexample_trial, ks_distance, run_replications, theorem1_suite, Ecdf, Emit, ExperimentConfig,
};
use sargmax_core::SimRng;

/// Counts `#{s <= x}` and `#{s < x}` directly and scans every sample point.
fn ks_naive(a: &[f64], b: &[f64]) -> f64 {
    let le = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    let lt = |s: &[f64], x: f64| s.iter().filter(|&&v| v < x).count() as f64 / s.len() as f64;
    a.iter()
        .chain(b)
        .map(|&x| (le(a, x) - le(b, x)).abs().max((lt(a, x) - lt(b, x)).abs()))
        .fold(0.0, f64::max)
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..12).prop_map(|k| k as f64 * 0.25), 1..25)
}

#[test]
fn ks_examples() {
    let e = |v: &[f64]| Ecdf::new(v).unwrap();
    assert_eq!(ks_distance(&e(&[1.0, 2.0]), &e(&[2.0, 1.0])), 0.0);
    assert_eq!(ks_distance(&e(&[0.0]), &e(&[1.0])), 1.0);
    assert_eq!(ks_distance(&e(&[0.0, 1.0]), &e(&[0.5])), 0.5);
    assert!(Ecdf::new(&[]).is_err());
}

proptest! {
    #[test]
    fn ks_matches_direct_count(a in samples(), b in samples()) {
        let d = ks_distance(&Ecdf::new(&a).unwrap(), &Ecdf::new(&b).unwrap());
        prop_assert!((d - ks_naive(&a, &b)).abs() < 1e-15);
    }

    #[test]
    fn ks_is_a_metric(a in samples(), b in samples(), c in samples()) {
        let (ea, eb, ec) = (Ecdf::new(&a).unwrap(), Ecdf::new(&b).unwrap(), Ecdf::new(&c).unwrap());
        let ab = ks_distance(&ea, &eb);
        prop_assert_eq!(ks_distance(&ea, &ea), 0.0);
        prop_assert_eq!(ab, ks_distance(&eb, &ea));
        prop_assert!(ab <= ks_distance(&ea, &ec) + ks_distance(&ec, &eb) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab));
    }
}

#[test]
fn counterexample_single_paths() {
    let ns = [10, 100, 1000];
    for seed in 0..50 {
        let rep = counterexample_trial(1.0, &ns, &mut SimRng::seed_from(seed)).unwrap();
        assert_eq!(rep.records.len(), 3);
        let first = &rep.records[0];
        for r in &rep.records {
            assert_eq!(r.sargmax_psi_n, 0.5 * r.sargmax_psi0);
            assert_eq!(r.largmax_psi_n, 0.5 * r.largmax_psi0);
            assert_eq!(r.sargmax_psi0, r.t_minus1);
            assert!(r.skorohod_dist <= 1.0 / r.n as f64);
            // the two inserted jumps keep the pure jump parts apart
            assert!(r.pure_jump_dist >= first.pure_jump_dist * 0.999);
            assert!(r.pure_jump_dist > 0.0);
        }
        assert!(rep.passed());
    }
}

#[test]
fn theorem1_golden() {
    let rep = theorem1_suite(&[10, 100, 1000, 10000]).unwrap();
    let at_1000 = rep.rows.iter().find(|r| r.n == 1000).unwrap();
    assert!(at_1000.sargmax_err <= 5e-3);
    assert!(rep.rows.iter().all(|r| r.sargmax_err <= rep.c_sargmax / r.n as f64));
    assert!(rep.rows.iter().all(|r| r.largmax_err <= rep.c_largmax / r.n as f64));
    assert!(rep.min_negative_gap > 0.1);
    assert_eq!(rep.largmax_limit[0], 0.5);
    let tilde: Vec<f64> = rep.rows.iter().map(|r| r.tilde_dist).collect();
    assert!(tilde.windows(2).all(|w| w[1] < w[0]));
    assert!(rep.rows.iter().all(|r| r.jump_counts_match && r.neg_pure_jump_dist >= 0.5));
    assert!(check_golden("theorem1.json", &to_json_pretty(&rep.summary()).unwrap()));
}

#[test]
fn replication_counts_and_order() {
    let cfg = ExperimentConfig {
        master_seed: 11,
        replications: 1,
        threads: 0,
    };
    let one = run_replications(&cfg, |r, rng| Ok((r, rng.uniform()))).unwrap();
    assert_eq!(one.samples.len(), 1);
    let cfg = ExperimentConfig {
        replications: 257,
        ..cfg
    };
    let a = run_replications(&cfg, |r, rng| Ok((r, rng.uniform()))).unwrap();
    let b = run_replications(&ExperimentConfig { threads: 3, ..cfg }, |r, rng| {
        Ok((r, rng.uniform()))
    })
    .unwrap();
    assert!(a.samples.iter().enumerate().all(|(i, (j, (r, _)))| i == *j && i == *r));
    assert_eq!(a.samples, b.samples);
}
