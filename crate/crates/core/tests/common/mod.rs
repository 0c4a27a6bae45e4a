// SPDX-License-Identifier: MIT OR Apache-2.0

//! Independent brute-force oracles and random instance generators shared by
//! the integration tests. Nothing here calls the solver being checked.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod suites;

use sargmax_core::changepoint::Dataset;
use sargmax_core::cox::SurvivalDataset;
use sargmax_core::skorohod::{ContinuousSection, Interval, PiecewiseProcess, Rect, StepFn1D, TimeWarp};
use sargmax_core::SimRng;

pub fn unit() -> Interval<f64> {
    Interval::new(0.0, 1.0).unwrap()
}

/// Step function on `[0, 1]` with up to `max_jumps` jumps on a 1/40 lattice
/// and values in `{0, 0.5, 1, 1.5}`.
pub fn random_step(rng: &mut SimRng, max_jumps: usize) -> StepFn1D<f64> {
    random_step_on(rng, unit(), max_jumps)
}

/// As [`random_step`] on `domain`, never jumping at its midpoint.
pub fn random_step_on(rng: &mut SimRng, domain: Interval<f64>, max_jumps: usize) -> StepFn1D<f64> {
    let k = (rng.next_u64() % (max_jumps as u64 + 1)) as usize;
    let mut jumps: Vec<f64> = (0..k)
        .map(|_| 1 + rng.next_u64() % 39)
        .filter(|&i| i != 20)
        .map(|i| domain.lo() + domain.len() * i as f64 / 40.0)
        .collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();
    let values = (0..=jumps.len())
        .map(|_| (rng.next_u64() % 4) as f64 * 0.5)
        .collect();
    StepFn1D::new(domain, jumps, values).unwrap()
}

/// Same, with jump locations and values drawn continuously.
pub fn random_step_cont(rng: &mut SimRng, max_jumps: usize) -> StepFn1D<f64> {
    let k = (rng.next_u64() % (max_jumps as u64 + 1)) as usize;
    let mut jumps: Vec<f64> = (0..k).map(|_| rng.uniform_in(0.01, 0.99)).collect();
    jumps.sort_by(f64::total_cmp);
    let values = (0..=k).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    StepFn1D::new(unit(), jumps, values).unwrap()
}

fn eval(f: &StepFn1D<f64>, t: f64) -> f64 {
    f.eval(t).unwrap()
}

/// `lambda^{-1}(y)` by bisection on `lambda.eval`.
fn invert(warp: &TimeWarp<f64>, y: f64) -> f64 {
    let d = warp.domain();
    let (mut lo, mut hi) = (d.lo(), d.hi());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if warp.eval(mid).unwrap() < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `max |log slope| + sup_t |f(t) - g(lambda(t))|`, with the sup taken by
/// sampling every piece of the merged partition at its midpoint and the ends.
pub fn direct_objective(f: &StepFn1D<f64>, g: &StepFn1D<f64>, warp: &TimeWarp<f64>) -> f64 {
    let knots = warp.knots();
    let norm = knots
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).ln().abs())
        .fold(0.0, f64::max);
    let d = f.domain();
    let mut pts = vec![d.lo(), d.hi()];
    pts.extend_from_slice(f.jumps());
    pts.extend(g.jumps().iter().map(|&y| invert(warp, y)));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let gap = |t: f64| (eval(f, t) - eval(g, warp.eval(t).unwrap())).abs();
    let mut sup = gap(d.hi());
    for w in pts.windows(2) {
        sup = sup.max(gap(0.5 * (w[0] + w[1])));
    }
    norm + sup
}

/// Brute-force Skorohod distance between step functions with few jumps:
/// every piecewise-linear warp whose interior knots are pairs (jump of f,
/// jump of g) increasing in both coordinates, evaluated by
/// [`direct_objective`].
pub fn skorohod_brute(f: &StepFn1D<f64>, g: &StepFn1D<f64>) -> f64 {
    fn rec(
        f: &StepFn1D<f64>,
        g: &StepFn1D<f64>,
        i0: usize,
        j0: usize,
        pairs: &mut Vec<(f64, f64)>,
        best: &mut f64,
    ) {
        let warp = TimeWarp::through(f.domain(), pairs).unwrap();
        *best = best.min(direct_objective(f, g, &warp));
        for i in i0..f.jumps().len() {
            for j in j0..g.jumps().len() {
                pairs.push((f.jumps()[i], g.jumps()[j]));
                rec(f, g, i + 1, j + 1, pairs, best);
                pairs.pop();
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(f, g, 0, 0, &mut Vec::new(), &mut best);
    best
}

/// A random strictly increasing piecewise-linear warp of `domain` with
/// knots on a mesh of `2^10` cells.
pub fn random_mesh_warp(rng: &mut SimRng, domain: Interval<f64>, knots: usize) -> TimeWarp<f64> {
    let cells = 1024u64;
    let at = |k: u64| domain.lo() + domain.len() * k as f64 / cells as f64;
    let mut xs: Vec<u64> = (0..knots).map(|_| 1 + rng.next_u64() % (cells - 1)).collect();
    let mut ys: Vec<u64> = (0..knots).map(|_| 1 + rng.next_u64() % (cells - 1)).collect();
    xs.sort();
    ys.sort();
    xs.dedup();
    ys.dedup();
    let m = xs.len().min(ys.len());
    let pairs: Vec<(f64, f64)> = xs[..m].iter().zip(&ys[..m]).map(|(&x, &y)| (at(x), at(y))).collect();
    TimeWarp::through(domain, &pairs).unwrap()
}

/// Random process on `[-2, 2] x [-1, 1]^(d-1)` with concave quadratic,
/// constant or grid sections.
pub fn random_process(rng: &mut SimRng, d: usize, max_jumps: usize) -> PiecewiseProcess<f64> {
    let k1 = Interval::new(-2.0, 2.0).unwrap();
    let k2: Vec<Interval<f64>> = (1..d).map(|_| Interval::new(-1.0, 1.0).unwrap()).collect();
    let rect = Rect::split(k1, &k2);
    let k = (rng.next_u64() % (max_jumps as u64 + 1)) as usize;
    let mut breaks: Vec<f64> = (0..k).map(|_| rng.uniform_in(-1.9, 1.9)).collect();
    breaks.retain(|b| b.abs() > 0.01);
    breaks.sort_by(f64::total_cmp);
    let m = d - 1;
    let sections = (0..=breaks.len())
        .map(|_| match (m, rng.next_u64() % 4) {
            (0, _) | (_, 0) => ContinuousSection::constant(rng.uniform_in(-1.0, 1.0)),
            (_, 1) if m <= 2 => {
                let grid: Vec<Vec<f64>> = (0..m).map(|_| vec![-1.0, -0.3, 0.4, 1.0]).collect();
                let values = (0..4usize.pow(m as u32)).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
                ContinuousSection::grid(grid, values).unwrap()
            }
            _ => {
                let a: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| rng.uniform_in(-0.5, 0.5)).collect()).collect();
                let mut mm = vec![vec![0.0; m]; m];
                for i in 0..m {
                    for j in 0..m {
                        mm[i][j] = 0.5 * (0..m).map(|l| a[i][l] * a[j][l]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
                    }
                }
                let w = (0..m).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
                ContinuousSection::quadratic(rng.uniform_in(-1.0, 1.0), w, mm).unwrap()
            }
        })
        .collect();
    PiecewiseProcess::from_breaks(rect, &breaks, sections).unwrap()
}

/// Dense-mesh extreme maximizers of `psi`.
///
/// Each stretch is sampled at its midpoint in `t` over a mesh of step `h` on
/// `K2`. The winning stretch gives `(left end, lex-min mesh argmax)` and
/// `(right end, lex-max mesh argmax)`. Returns `None` when the runner-up
/// stretch comes within `margin` of the winner, so that mesh error cannot
/// change the winner.
pub fn mesh_extreme_argmax(psi: &PiecewiseProcess<f64>, h: f64, margin: f64) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let rect = psi.rect();
    let axis = |iv: Interval<f64>| {
        let n = (iv.len() / h).round() as usize;
        (0..=n).map(|i| iv.lo() + iv.len() * i as f64 / n as f64).collect::<Vec<_>>()
    };
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for &iv in rect.k2() {
        let a = axis(iv);
        pts = pts
            .iter()
            .flat_map(|p| {
                a.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let k1 = rect.k1();
    let mut ends = vec![k1.lo()];
    ends.extend_from_slice(psi.breaks());
    ends.push(k1.hi());
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut runner_up = f64::NEG_INFINITY;
    for s in 0..ends.len() - 1 {
        let t = 0.5 * (ends[s] + ends[s + 1]);
        let vals: Vec<f64> = pts.iter().map(|x| psi.eval(t, x).unwrap()).collect();
        let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        match &best {
            Some((_, b, _)) if *b >= top => runner_up = runner_up.max(top),
            _ => {
                if let Some((_, b, _)) = &best {
                    runner_up = runner_up.max(*b);
                }
                best = Some((s, top, vals));
            }
        }
    }
    let (s, top, vals) = best.unwrap();
    if top - runner_up < margin {
        return None;
    }
    let win: Vec<&Vec<f64>> = pts.iter().zip(&vals).filter(|(_, &v)| v >= top - 1e-12).map(|(p, _)| p).collect();
    let lex = |a: &&&Vec<f64>, b: &&&Vec<f64>| a.partial_cmp(b).unwrap();
    let mut first = vec![ends[s]];
    first.extend_from_slice(win.iter().min_by(lex).unwrap());
    let mut last = vec![ends[s + 1]];
    last.extend_from_slice(win.iter().max_by(lex).unwrap());
    Some((first, last, top))
}

/// Least-squares change-point fit by direct enumeration of every split.
pub fn cp_brute(data: &Dataset, c1: f64, c2: f64) -> (f64, f64) {
    let mut cands = vec![c1];
    cands.extend(data.z().iter().copied().filter(|&z| z > c1 && z <= c2));
    cands.sort_by(f64::total_cmp);
    let overall = data.y().iter().sum::<f64>() / data.len() as f64;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &zeta in &cands {
        let left: Vec<f64> = data.y().iter().zip(data.z()).filter(|p| *p.1 <= zeta).map(|p| *p.0).collect();
        let right: Vec<f64> = data.y().iter().zip(data.z()).filter(|p| *p.1 > zeta).map(|p| *p.0).collect();
        let mean = |v: &[f64]| if v.is_empty() { overall } else { v.iter().sum::<f64>() / v.len() as f64 };
        let (a, b) = (mean(&left), mean(&right));
        let ss: f64 = left.iter().map(|y| (y - a) * (y - a)).sum::<f64>()
            + right.iter().map(|y| (y - b) * (y - b)).sum::<f64>();
        let obj = -ss / data.len() as f64;
        if obj > best.1 {
            best = (zeta, obj);
        }
    }
    best
}

/// Cox log partial likelihood, written out risk set by risk set.
pub fn cox_loglik_naive(data: &SurvivalDataset, zeta: f64, xi: &[f64]) -> f64 {
    let (p, q) = (data.p(), data.q());
    let eta = |j: usize| {
        let mut e: f64 = (0..p).map(|a| xi[a] * data.z1()[j][a]).sum();
        let off = if data.z3()[j] <= zeta { p } else { p + q };
        e += (0..q).map(|a| xi[off + a] * data.z2()[j][a]).sum::<f64>();
        e
    };
    let n = data.len();
    let mut l = 0.0;
    for k in 0..n {
        if !data.delta()[k] {
            continue;
        }
        let denom: f64 = (0..n).filter(|&j| data.t()[j] >= data.t()[k]).map(|j| eta(j).exp()).sum();
        l += eta(k) - denom.ln();
    }
    l
}

/// Log partial likelihood with risk sets taken as suffixes of the subjects
/// sorted by time; `O(n)` per call once `order` (decreasing time) is known.
pub fn cox_loglik_sorted(data: &SurvivalDataset, order: &[usize], zeta: f64, xi: &[f64]) -> f64 {
    let (p, q) = (data.p(), data.q());
    let mut s0 = 0.0;
    let mut l = 0.0;
    for &j in order {
        let mut e: f64 = (0..p).map(|a| xi[a] * data.z1()[j][a]).sum();
        let off = if data.z3()[j] <= zeta { p } else { p + q };
        e += (0..q).map(|a| xi[off + a] * data.z2()[j][a]).sum::<f64>();
        s0 += e.exp();
        if data.delta()[j] {
            l += e - s0.ln();
        }
    }
    l
}

/// Inner maximum over the coefficients by a shrinking grid: 5 points per
/// axis around the incumbent, radius times 0.7 per round.
pub fn cox_grid_max(data: &SurvivalDataset, zeta: f64, radius: f64) -> (f64, Vec<f64>) {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data.t()[b].total_cmp(&data.t()[a]));
    let d = data.p() + 2 * data.q();
    let mut center = vec![0.0; d];
    let mut best = cox_loglik_sorted(data, &order, zeta, &center);
    let mut r = radius;
    for _ in 0..90 {
        let mut idx = vec![0usize; d];
        let mut cand = center.clone();
        'grid: loop {
            let x: Vec<f64> = idx.iter().zip(&center).map(|(&i, &c)| c + r * (i as f64 - 2.0) / 2.0).collect();
            let v = cox_loglik_sorted(data, &order, zeta, &x);
            if v > best {
                best = v;
                cand = x;
            }
            for k in 0..d {
                idx[k] += 1;
                if idx[k] < 5 {
                    continue 'grid;
                }
                idx[k] = 0;
            }
            break;
        }
        center = cand;
        r *= 0.7;
    }
    (best, center)
}

/// Compares `contents` with `tests/golden/<name>`; `SARGMAX_BLESS=1` rewrites the file instead.
pub fn check_golden(name: &str, contents: &str) -> bool {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("SARGMAX_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, contents).unwrap();
        return true;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    expected == contents
}

/// Reads a shipped experiment config from the workspace `configs/` directory.
pub fn shipped_config<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    toml::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
