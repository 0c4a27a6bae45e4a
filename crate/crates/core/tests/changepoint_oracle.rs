// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use sargmax_core::changepoint::{fit_cp, localized_process, simulate_cp, ChangePointModel, Dataset};
use sargmax_core::processes::{derive_cp_limit_spec, JumpLaw};
use sargmax_core::skorohod::{Interval, Rect};
use sargmax_core::SimRng;

fn model(zeta0: f64, alpha0: f64, beta0: f64, sigma: f64) -> ChangePointModel {
    serde_json::from_value(serde_json::json!({
        "zeta0": zeta0, "alpha0": alpha0, "beta0": beta0, "c1": 0.1, "c2": 0.9,
        "z_law": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
        "eps_law": {"kind": "normal", "sigma": sigma}
    }))
    .unwrap()
}

#[test]
fn fit_matches_split_enumeration() {
    common::suites::cp_vs_brute(1000, 2024).unwrap();
}

#[test]
fn two_cluster_example() {
    let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let z = vec![0.15, 0.25, 0.35, 0.55, 0.65, 0.75];
    let fit = fit_cp(&Dataset::new(y, z).unwrap(), 0.1, 0.9).unwrap();
    assert_eq!(fit.zeta, 0.35);
    assert_eq!((fit.alpha, fit.beta), (0.0, 1.0));
    assert_eq!(fit.objective, 0.0);
}

/// `sum_i (y_i - mu_0(z_i))^2 - (y_i - mu_theta(z_i))^2` at
/// `theta = theta0 + (h1/n, h2/sqrt n, h3/sqrt n)`.
fn localized_direct(data: &Dataset, m: &ChangePointModel, h: [f64; 3]) -> f64 {
    let n = data.len() as f64;
    let zeta = m.zeta0 + h[0] / n;
    let (a, b) = (m.alpha0 + h[1] / n.sqrt(), m.beta0 + h[2] / n.sqrt());
    data.y()
        .iter()
        .zip(data.z())
        .map(|(&y, &z)| {
            let mu0 = if z <= m.zeta0 { m.alpha0 } else { m.beta0 };
            let mu = if z <= zeta { a } else { b };
            (y - mu0).powi(2) - (y - mu).powi(2)
        })
        .sum()
}

#[test]
fn localized_process_matches_direct_evaluation() {
    let mut rng = SimRng::seed_from(77);
    let m = model(0.5, 0.0, 1.0, 0.5);
    let iv = |a: f64| Interval::new(-a, a).unwrap();
    let rect = Rect::split(iv(20.0), &[iv(3.0), iv(3.0)]);
    for _ in 0..50 {
        let n = 100 + (rng.next_u64() % 400) as usize;
        let data = simulate_cp(&m, n, &mut rng).unwrap();
        let (psi, jumps) = localized_process(&data, &m, &rect).unwrap();
        let inside = data.z().iter().filter(|&&z| (n as f64 * (z - 0.5)).abs() < 20.0).count();
        assert_eq!(psi.breaks().len(), inside);
        assert_eq!(jumps.jumps_neg().len() + jumps.jumps_pos().len(), inside);
        for _ in 0..40 {
            let h = [rng.uniform_in(-20.0, 20.0), rng.uniform_in(-3.0, 3.0), rng.uniform_in(-3.0, 3.0)];
            let direct = localized_direct(&data, &m, h);
            let rep = psi.eval(h[0], &h[1..]).unwrap();
            assert!((direct - rep).abs() <= 1e-9 * (1.0 + direct.abs()), "{direct} vs {rep}");
        }
    }
}

#[test]
fn limit_spec_of_the_reference_model() {
    let spec = derive_cp_limit_spec(&model(0.5, 0.0, 1.0, 0.5)).unwrap();
    assert_eq!((spec.rate_pos, spec.rate_neg), (1.0, 1.0));
    assert!(matches!(spec.law_pos, JumpLaw::Shifted { c, s, .. } if c == 1.0 && s == 2.0));
    assert!(matches!(spec.law_neg, JumpLaw::Shifted { c, s, .. } if c == 1.0 && s == -2.0));
    assert_eq!(spec.law_pos.mean(), -1.0);
    let flat = serde_json::from_value::<ChangePointModel>(serde_json::json!({
        "zeta0": 0.5, "alpha0": 1.0, "beta0": 1.0, "c1": 0.1, "c2": 0.9,
        "z_law": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
        "eps_law": {"kind": "normal", "sigma": 0.5}
    }));
    assert!(flat.is_err());
}
