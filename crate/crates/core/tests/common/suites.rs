// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded oracle comparisons shared by the per-module tests and the
//! acceptance target. Each returns a short tally or the first mismatch.

use sargmax_core::changepoint::{fit_cp, simulate_cp, ChangePointModel};
use sargmax_core::cox::{fit_cox_threshold, simulate_cox, CoxThresholdModel};
use sargmax_core::sargmax::{maximizer_set, sargmax, MaximizerReport};
use sargmax_core::skorohod::{
    skorohod_dist_1d, sup_dist, tilde_dist, ContinuousSection, Interval, PiecewiseProcess, Rect, TimeWarp,
};
use sargmax_core::SimRng;

use super::*;

pub type Outcome = Result<String, String>;

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

/// `d <= d~ <= sup distance` on `pairs` random step pairs on `[-0.5, 0.5]`.
pub fn metric_ordering(pairs: usize, seed: u64) -> Outcome {
    let dom = Interval::new(-0.5, 0.5).unwrap();
    let mut rng = SimRng::seed_from(seed);
    let mut strict = 0;
    for i in 0..pairs {
        let f = random_step_on(&mut rng, dom, 5);
        let g = random_step_on(&mut rng, dom, 5);
        let d = skorohod_dist_1d(&f, &g).map_err(|e| e.to_string())?;
        let pf = PiecewiseProcess::from_step(&f).unwrap();
        let pg = PiecewiseProcess::from_step(&g).unwrap();
        let t = tilde_dist(&pf, &pg).map_err(|e| e.to_string())?.upper_bound;
        let s = sup_dist(&f, &g).unwrap();
        if !(d <= t + 1e-12 && t <= s + 1e-12) {
            return fail(format!("pair {i}: d {d}, tilde {t}, sup {s}"));
        }
        if t < s - 1e-12 {
            strict += 1;
        }
    }
    Ok(format!("{pairs} pairs, {strict} with tilde strictly below sup"))
}

/// Pareto dynamic program against jump-pair enumeration.
pub fn skorohod_vs_brute(instances: usize, seed: u64) -> Outcome {
    let mut rng = SimRng::seed_from(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let f = random_step(&mut rng, 3);
        let g = random_step(&mut rng, 3);
        let d = skorohod_dist_1d(&f, &g).map_err(|e| e.to_string())?;
        let b = skorohod_brute(&f, &g);
        if (d - b).abs() >= 1e-6 {
            return fail(format!("instance {i}: dp {d}, brute {b}"));
        }
        worst = worst.max((d - b).abs());
    }
    Ok(format!("{instances} instances, max |dp - brute| = {worst:.1e}"))
}

/// Random warp of `domain` with every log slope inside `(-delta, delta)`.
pub fn random_warp_below(rng: &mut SimRng, domain: Interval<f64>, delta: f64) -> TimeWarp<f64> {
    let k = 1 + (rng.next_u64() % 6) as usize;
    let mut cuts: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let dx: Vec<f64> = cuts.windows(2).map(|w| (w[1] - w[0]) * domain.len()).collect();
    // slopes e^r with |r| < delta / 2; normalizing by their weighted mean
    // keeps every log slope below delta
    let dy: Vec<f64> = dx.iter().map(|d| d * rng.uniform_in(-0.499 * delta, 0.499 * delta).exp()).collect();
    let scale = domain.len() / dy.iter().sum::<f64>();
    let (mut x, mut y) = (domain.lo(), domain.lo());
    let mut pairs = Vec::new();
    for i in 0..dx.len() - 1 {
        x += dx[i];
        y += dy[i] * scale;
        pairs.push((x, y));
    }
    TimeWarp::through(domain, &pairs).unwrap()
}

/// For warps of `[u, v]` with norm below `min(1/4, eps / (2 |v - u|))`, the
/// displacement stays below `eps`.
pub fn warp_displacement(warps: usize, seed: u64) -> Outcome {
    let mut rng = SimRng::seed_from(seed);
    for i in 0..warps {
        let u = rng.uniform_in(-5.0, 5.0);
        let v = u + rng.uniform_in(0.1, 10.0);
        let eps = rng.uniform_in(0.001, 2.0);
        let delta = 0.25f64.min(eps / (2.0 * (v - u)));
        let w = random_warp_below(&mut rng, Interval::new(u, v).unwrap(), delta);
        if !(w.norm() < delta && w.displacement() < eps) {
            return fail(format!("warp {i}: norm {} delta {delta} disp {} eps {eps}", w.norm(), w.displacement()));
        }
    }
    Ok(format!("{warps} warps"))
}

pub const MESH: f64 = 0.02;

pub fn max_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Existence and closedness: a flat attains the sup, the value is attained
/// at the left end and approached at the right end of every flat.
pub fn check_report(psi: &PiecewiseProcess<f64>, r: &MaximizerReport<f64>) -> Result<(), String> {
    if r.flats.is_empty() {
        return Err("no flat".into());
    }
    let tol = 1e-9 * (1.0 + r.global_sup.abs());
    for w in r.flats.windows(2) {
        if w[0].stretch_closed.hi() > w[1].stretch_closed.lo() {
            return Err("flats overlap or are unordered".into());
        }
    }
    for fl in &r.flats {
        let iv = fl.stretch_closed;
        if (fl.sup_value - r.global_sup).abs() > tol {
            return Err("flat below the sup".into());
        }
        let at_lo = psi.eval(iv.lo(), &fl.section_argmax).map_err(|e| e.to_string())?;
        let at_hi = psi.eval_left(iv.hi(), &fl.section_argmax_last).map_err(|e| e.to_string())?;
        if (at_lo - r.global_sup).abs() > tol || (at_hi - r.global_sup).abs() > tol {
            return Err(format!("sup not attained on the closed flat: {at_lo} {at_hi} vs {}", r.global_sup));
        }
    }
    if r.sargmax_point.partial_cmp(&r.largmax_point) == Some(std::cmp::Ordering::Greater) {
        return Err("sargmax after largmax".into());
    }
    Ok(())
}

/// Extreme argmaxes against a dense mesh on `instances` processes with
/// `d = 1, 2, 3`, skipping near-ties the mesh cannot resolve.
pub fn sargmax_vs_mesh(instances: usize, seed: u64) -> Outcome {
    let mut rng = SimRng::seed_from(seed);
    let (mut checked, mut skipped) = (0, 0);
    while checked < instances {
        let d = 1 + checked % 3;
        let psi = random_process(&mut rng, d, 4);
        let r = maximizer_set(&psi, 0.0).map_err(|e| e.to_string())?;
        check_report(&psi, &r).map_err(|e| format!("instance {checked}: {e}"))?;
        let Some((first, last, _)) = mesh_extreme_argmax(&psi, MESH, 0.05) else {
            skipped += 1;
            continue;
        };
        let (es, el) = (max_norm(&r.sargmax_point, &first), max_norm(&r.largmax_point, &last));
        if es > 2.0 * MESH || el > 2.0 * MESH {
            return fail(format!("instance {checked}: sargmax {:?} mesh {first:?}", r.sargmax_point));
        }
        checked += 1;
    }
    Ok(format!("{checked} instances within 2 * {MESH}, {skipped} near-ties skipped"))
}

/// A jump-free concave quadratic `W` with a unique maximizer over `K2`, and
/// perturbations `W_j` at sup distance below `delta_j = 2^-j`: the sargmax
/// error shrinks along the ladder.
pub fn continuity_ladder() -> Outcome {
    let rect = Rect::split(Interval::new(-1.0, 1.0).unwrap(), &[Interval::new(-1.0, 1.0).unwrap(); 2]);
    let m = vec![vec![2.0, 0.3], vec![0.3, 1.0]];
    let w_sec = ContinuousSection::quadratic(0.5, vec![0.4, -0.2], m.clone()).unwrap();
    let w = PiecewiseProcess::from_breaks(rect.clone(), &[], vec![w_sec.clone()]).unwrap();
    let star = sargmax(&w);
    let mut prev = f64::INFINITY;
    for j in 1..=8 {
        let delta = 0.5f64.powi(j);
        // |dc| + |dw|_1 bounds the sup difference on [-1, 1]^2
        let q = delta / 4.0;
        let pert = ContinuousSection::quadratic(0.5 + q, vec![0.4 + q, -0.2 - q], m.clone()).unwrap();
        let gap = pert.sup_abs_diff(&w_sec, rect.k2());
        if gap >= delta {
            return fail(format!("step {j}: sup distance {gap} >= {delta}"));
        }
        let wj = PiecewiseProcess::from_breaks(rect.clone(), &[], vec![pert]).unwrap();
        let err = max_norm(&sargmax(&wj), &star);
        if err > prev {
            return fail(format!("ladder not monotone at step {j}"));
        }
        prev = err;
    }
    if prev >= 1e-2 {
        return fail(format!("final error {prev}"));
    }
    Ok(format!("8 rungs, final error {prev:.2e}"))
}

pub fn cp_model(zeta0: f64, alpha0: f64, beta0: f64, sigma: f64) -> ChangePointModel {
    serde_json::from_value(serde_json::json!({
        "zeta0": zeta0, "alpha0": alpha0, "beta0": beta0, "c1": 0.1, "c2": 0.9,
        "z_law": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
        "eps_law": {"kind": "normal", "sigma": sigma}
    }))
    .unwrap()
}

/// Least squares fit against split enumeration on random datasets of size 3..=50.
pub fn cp_vs_brute(datasets: usize, seed: u64) -> Outcome {
    let mut rng = SimRng::seed_from(seed);
    let mut worst = 0.0f64;
    for i in 0..datasets {
        let n = 3 + (rng.next_u64() % 48) as usize;
        let m = cp_model(
            rng.uniform_in(0.2, 0.8),
            rng.uniform_in(-1.0, 1.0),
            rng.uniform_in(-1.0, 1.0),
            rng.uniform_in(0.05, 2.0),
        );
        let data = simulate_cp(&m, n, &mut rng).unwrap();
        let fit = fit_cp(&data, m.c1, m.c2).map_err(|e| e.to_string())?;
        let (zeta, obj) = cp_brute(&data, m.c1, m.c2);
        if fit.zeta != zeta || (fit.objective - obj).abs() > 1e-12 {
            return fail(format!("dataset {i}: fit ({}, {}) brute ({zeta}, {obj})", fit.zeta, fit.objective));
        }
        worst = worst.max((fit.objective - obj).abs());
    }
    Ok(format!("{datasets} datasets, zeta exact, max objective gap {worst:.1e}"))
}

/// Newton profile values against the grid oracle on random datasets of size 25..=40.
///
/// Candidates whose maximizer leaves the grid box are not compared.
pub fn cox_vs_grid(model: &CoxThresholdModel, datasets: usize, seed: u64) -> Outcome {
    let mut rng = SimRng::seed_from(seed);
    let (mut compared, mut worst) = (0, 0.0f64);
    for i in 0..datasets {
        let n = 25 + (rng.next_u64() % 16) as usize;
        let d = simulate_cox(model, n, &mut rng).unwrap();
        let fit = fit_cox_threshold(&d, model.interval).map_err(|e| e.to_string())?;
        for p in fit.profile.iter().filter(|p| p.converged && !p.separated) {
            if p.xi.iter().any(|v| v.abs() > 6.0) {
                continue;
            }
            let (v, _) = cox_grid_max(&d, p.zeta, 8.0);
            if (v - p.loglik).abs() >= 1e-6 {
                return fail(format!("dataset {i}, zeta {}: newton {} grid {v}", p.zeta, p.loglik));
            }
            worst = worst.max((v - p.loglik).abs());
            compared += 1;
        }
    }
    if compared <= 5 * datasets {
        return fail(format!("only {compared} profile points compared"));
    }
    Ok(format!("{datasets} datasets, {compared} profile points, max gap {worst:.1e}"))
}
