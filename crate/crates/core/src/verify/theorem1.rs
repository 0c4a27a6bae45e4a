// SPDX-License-Identifier: MIT OR Apache-2.0

//! A deterministic sequence `psi_n -> psi_0` in the step-in-time class, with
//! and without convergence of the pure jump functions.
//!
//! `psi_0` lives on `[-2, 2] x [-1, 1]`, jumps at `-1` and `0.5`, and carries
//! the sections `c + w xi - xi^2 M / 2` with `(c, w, M)` equal to
//! `(0.2, 0.3, 1)`, `(1.0, 0.2, 2)` and `(0.5, -0.5, 1)`. The middle stretch
//! wins, so `sargmax = (-1, 0.1)` and `largmax = (0.5, 0.1)`.
//!
//! `psi_n` moves the jumps to `-1 + 1/n` and `0.5 - 1/n` and adds `1/n` to
//! every `c` and `w`. The negative control adds `(1/n) 1[-0.5, 0.25)` to
//! `psi_0`, which converges uniformly but inserts two jumps.

use serde::Serialize;

use crate::error::Result;
use crate::sargmax::{largmax, sargmax};
use crate::skorohod::{tilde_dist, ContinuousSection, Interval, PiecewiseProcess, Rect};

const SECTIONS: [(f64, f64, f64); 3] = [(0.2, 0.3, 1.0), (1.0, 0.2, 2.0), (0.5, -0.5, 1.0)];
const BREAKS: [f64; 2] = [-1.0, 0.5];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Row {
    pub n: usize,
    pub tilde_dist: f64,
    pub pure_jump_dist: f64,
    pub jump_counts_match: bool,
    pub sargmax: Vec<f64>,
    pub largmax: Vec<f64>,
    /// Euclidean distance to the limit's sargmax.
    pub sargmax_err: f64,
    pub largmax_err: f64,
    pub neg_tilde_dist: f64,
    pub neg_pure_jump_dist: f64,
    /// Euclidean distance between the control's sargmax and the limit's.
    pub neg_sargmax_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub sargmax_limit: Vec<f64>,
    pub largmax_limit: Vec<f64>,
    pub rows: Vec<Theorem1Row>,
    /// `max_n n * sargmax_err`.
    pub c_sargmax: f64,
    /// `max_n n * largmax_err`.
    pub c_largmax: f64,
    /// `min_n neg_sargmax_gap`.
    pub min_negative_gap: f64,
}

fn rect() -> Rect<f64> {
    let k1 = Interval::new(-2.0, 2.0).expect("static");
    let k2 = Interval::new(-1.0, 1.0).expect("static");
    Rect::split(k1, &[k2])
}

fn section(c: f64, w: f64, m: f64) -> Result<ContinuousSection<f64>> {
    ContinuousSection::quadratic(c, vec![w], vec![vec![m]])
}

fn limit() -> Result<PiecewiseProcess<f64>> {
    let sections = SECTIONS
        .iter()
        .map(|&(c, w, m)| section(c, w, m))
        .collect::<Result<Vec<_>>>()?;
    PiecewiseProcess::from_breaks(rect(), &BREAKS, sections)
}

fn perturbed(n: usize) -> Result<PiecewiseProcess<f64>> {
    let h = 1.0 / n as f64;
    let sections = SECTIONS
        .iter()
        .map(|&(c, w, m)| section(c + h, w + h, m))
        .collect::<Result<Vec<_>>>()?;
    PiecewiseProcess::from_breaks(rect(), &[BREAKS[0] + h, BREAKS[1] - h], sections)
}

fn negative_control(n: usize) -> Result<PiecewiseProcess<f64>> {
    let h = 1.0 / n as f64;
    let [(cl, wl, ml), (cm, wm, mm), (cr, wr, mr)] = SECTIONS;
    let mid = section(cm, wm, mm)?;
    let sections = vec![section(cl, wl, ml)?, mid.clone(), mid.shifted(h), mid, section(cr, wr, mr)?];
    PiecewiseProcess::from_breaks(rect(), &[-1.0, -0.5, 0.25, 0.5], sections)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Runs the positive sequence and the negative control at every `n`.
pub fn theorem1_suite(ns: &[usize]) -> Result<Theorem1Report> {
    crate::error::ensure!(
        !ns.is_empty() && ns.iter().all(|&n| n >= 3),
        "n values must be at least 3 so the perturbed jumps stay ordered"
    );
    let psi0 = limit()?;
    let (s0, l0) = (sargmax(&psi0), largmax(&psi0));
    let pj0 = psi0.pure_jump();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let psi = perturbed(n)?;
        let neg = negative_control(n)?;
        let pj = psi.pure_jump();
        let (s, l) = (sargmax(&psi), largmax(&psi));
        rows.push(Theorem1Row {
            n,
            tilde_dist: tilde_dist(&psi, &psi0)?.upper_bound,
            pure_jump_dist: pj.distance(&pj0)?,
            jump_counts_match: pj.jumps_neg().len() == pj0.jumps_neg().len()
                && pj.jumps_pos().len() == pj0.jumps_pos().len(),
            sargmax_err: euclid(&s, &s0),
            largmax_err: euclid(&l, &l0),
            sargmax: s,
            largmax: l,
            neg_tilde_dist: tilde_dist(&neg, &psi0)?.upper_bound,
            neg_pure_jump_dist: neg.pure_jump().distance(&pj0)?,
            neg_sargmax_gap: euclid(&sargmax(&neg), &s0),
        });
    }
    let c = |f: fn(&Theorem1Row) -> f64| rows.iter().map(|r| r.n as f64 * f(r)).fold(0.0, f64::max);
    Ok(Theorem1Report {
        c_sargmax: c(|r| r.sargmax_err),
        c_largmax: c(|r| r.largmax_err),
        min_negative_gap: rows.iter().map(|r| r.neg_sargmax_gap).fold(f64::INFINITY, f64::min),
        sargmax_limit: s0,
        largmax_limit: l0,
        rows,
    })
}
