// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sup-norm and Skorohod-type distances between step-in-`t` functions.
//!
//! For two step functions the Skorohod infimum is attained in the closure of
//! the warps that are piecewise linear through a monotone partial matching of
//! the two jump sets: the sup-norm term only depends on how the warped jumps
//! interleave, and the cheapest warp realising a given interleaving is linear
//! between the points where it touches a constraint, each of which can be
//! turned into an exact match without increasing either term. The search below
//! walks all such matchings with a Pareto front of `(warp norm, sup term)`
//! pairs per matched pair, since the objective is a sum of two maxima.

use super::step::ensure_same_domain;
use super::warp::segment_log_slope;
use super::{Interval, PiecewiseProcess, StepFn1D, TimeWarp};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// A function on `K1 x K2` that is constant in `t` between breakpoints.
pub trait StretchFunction<T: Scalar> {
    fn k1(&self) -> Interval<T>;

    /// Interior breakpoints in ascending order.
    fn break_points(&self) -> &[T];

    /// `sup over K2` of `|V_i - W_j|` for stretch `i` of `self` and stretch `j` of `other`.
    fn stretch_gap(&self, i: usize, other: &Self, j: usize) -> T;

    fn ensure_compatible(&self, other: &Self) -> Result<()>;
}

impl<T: Scalar> StretchFunction<T> for StepFn1D<T> {
    fn k1(&self) -> Interval<T> {
        self.domain()
    }

    fn break_points(&self) -> &[T] {
        self.jumps()
    }

    fn stretch_gap(&self, i: usize, other: &Self, j: usize) -> T {
        (self.values()[i] - other.values()[j]).abs()
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        ensure_same_domain(self.domain(), other.domain())
    }
}

impl<T: Scalar> StretchFunction<T> for PiecewiseProcess<T> {
    fn k1(&self) -> Interval<T> {
        self.rect().k1()
    }

    fn break_points(&self) -> &[T] {
        self.breaks()
    }

    fn stretch_gap(&self, i: usize, other: &Self, j: usize) -> T {
        self.sections()[i].sup_abs_diff(&other.sections()[j], self.rect().k2())
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.rect() == other.rect() {
            Ok(())
        } else {
            Err(Error::Mismatch(
                "processes live on different rectangles".to_string(),
            ))
        }
    }
}

/// Walks the stretch pairs `(i, j)` that overlap when `f` has breaks `fb` and
/// `g` has breaks `gb`, starting from `(i0, j0)`; equal breaks advance both.
fn overlap_max<T: Scalar>(
    fb: impl Iterator<Item = T>,
    gb: impl Iterator<Item = T>,
    (i0, j0): (usize, usize),
    mut gap: impl FnMut(usize, usize) -> T,
) -> T {
    let mut fb = fb.peekable();
    let mut gb = gb.peekable();
    let (mut i, mut j) = (i0, j0);
    let mut best = gap(i, j);
    loop {
        match (fb.peek(), gb.peek()) {
            (None, None) => return best,
            (Some(_), None) => {
                fb.next();
                i += 1;
            }
            (None, Some(_)) => {
                gb.next();
                j += 1;
            }
            (Some(&a), Some(&b)) => {
                if a <= b {
                    fb.next();
                    i += 1;
                }
                if b <= a {
                    gb.next();
                    j += 1;
                }
            }
        }
        best = best.max(gap(i, j));
    }
}

/// `sup |f - g|` over `K1 x K2`, taken stretch pair by stretch pair.
pub fn sup_dist<T: Scalar, F: StretchFunction<T>>(f: &F, g: &F) -> Result<T> {
    f.ensure_compatible(g)?;
    Ok(overlap_max(
        f.break_points().iter().copied(),
        g.break_points().iter().copied(),
        (0, 0),
        |i, j| f.stretch_gap(i, g, j),
    ))
}

/// `norm(warp) + sup |f - g o warp|` for a warp of the first coordinate.
pub fn warp_objective<T: Scalar, F: StretchFunction<T>>(
    f: &F,
    g: &F,
    warp: &TimeWarp<T>,
) -> Result<T> {
    f.ensure_compatible(g)?;
    ensure_same_domain(f.k1(), warp.domain())?;
    let sup = overlap_max(
        f.break_points().iter().copied(),
        g.break_points().iter().map(|&b| warp.inverse(b)),
        (0, 0),
        |i, j| f.stretch_gap(i, g, j),
    );
    Ok(warp.norm() + sup)
}

/// Result of the matching search: the best objective and a warp attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct TildeDist<T> {
    pub upper_bound: T,
    pub certificate: TimeWarp<T>,
}

#[derive(Clone, Copy, Debug)]
struct FrontEntry<T> {
    norm: T,
    sup: T,
    /// Predecessor node and its front entry.
    back: Option<(usize, usize)>,
}

/// Pareto insertion: keeps `front` free of dominated `(norm, sup)` pairs.
fn insert<T: Scalar>(front: &mut Vec<FrontEntry<T>>, e: FrontEntry<T>) {
    if front.iter().any(|o| o.norm <= e.norm && o.sup <= e.sup) {
        return;
    }
    front.retain(|o| !(e.norm <= o.norm && e.sup <= o.sup));
    front.push(e);
}

fn matching_search<T: Scalar, F: StretchFunction<T>>(f: &F, g: &F) -> Result<TildeDist<T>> {
    f.ensure_compatible(g)?;
    let dom = f.k1();
    let fb = f.break_points();
    let gb = g.break_points();
    let (m, k) = (fb.len(), gb.len());

    // a[p], b[q]: breaks padded with the domain ends
    let pad = |v: &[T]| {
        let mut out = Vec::with_capacity(v.len() + 2);
        out.push(dom.lo());
        out.extend_from_slice(v);
        out.push(dom.hi());
        out
    };
    let a = pad(fb);
    let b = pad(gb);

    let mut gaps = vec![vec![T::zero(); k + 1]; m + 1];
    for (i, row) in gaps.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = f.stretch_gap(i, g, j);
        }
    }

    // nodes (p, q): start (0, 0), end (m+1, k+1), interior matches 1..=m x 1..=k
    let width = k + 2;
    let node = |p: usize, q: usize| p * width + q;
    let end = node(m + 1, k + 1);
    let mut fronts: Vec<Vec<FrontEntry<T>>> = vec![Vec::new(); (m + 2) * width];

    let identity = overlap_max(fb.iter().copied(), gb.iter().copied(), (0, 0), |i, j| gaps[i][j]);
    let mut budget = identity;
    fronts[node(0, 0)].push(FrontEntry {
        norm: T::zero(),
        sup: T::zero(),
        back: None,
    });

    let segment_sup = |p: usize, q: usize, p2: usize, q2: usize| {
        let (s0, s1, l0, l1) = (a[p], a[p2], b[q], b[q2]);
        overlap_max(
            a[p + 1..p2].iter().copied(),
            b[q + 1..q2]
                .iter()
                .map(|&y| s0 + (y - l0) * (s1 - s0) / (l1 - l0)),
            (p, q),
            |i, j| gaps[i][j],
        )
    };

    for p in 0..=m {
        for q in 0..=k {
            if (p == 0) != (q == 0) {
                continue;
            }
            let here = node(p, q);
            if fronts[here].is_empty() {
                continue;
            }
            let targets = (p + 1..=m)
                .flat_map(|p2| (q + 1..=k).map(move |q2| (p2, q2)))
                .chain(std::iter::once((m + 1, k + 1)));
            for (p2, q2) in targets {
                let norm = segment_log_slope((a[p], b[q]), (a[p2], b[q2]));
                if norm > budget {
                    continue;
                }
                let mut sup: Option<T> = None;
                for idx in 0..fronts[here].len() {
                    let e = fronts[here][idx];
                    let n2 = e.norm.max(norm);
                    if n2 + e.sup > budget {
                        continue;
                    }
                    let s = *sup.get_or_insert_with(|| segment_sup(p, q, p2, q2));
                    let s2 = e.sup.max(s);
                    if n2 + s2 > budget {
                        continue;
                    }
                    let target = node(p2, q2);
                    if target == end {
                        budget = budget.min(n2 + s2);
                    }
                    insert(
                        &mut fronts[target],
                        FrontEntry {
                            norm: n2,
                            sup: s2,
                            back: Some((here, idx)),
                        },
                    );
                }
            }
        }
    }

    // the direct segment is the identity warp, which the search always keeps
    // unless something at least as good replaced it
    let (best_idx, best) = fronts[end]
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.norm + e.sup))
        .fold(None, |acc: Option<(usize, T)>, (i, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((i, v)),
        })
        .expect("the identity warp reaches the end node");

    let mut pairs = Vec::new();
    let mut cursor = fronts[end][best_idx].back;
    while let Some((n, idx)) = cursor {
        let (p, q) = (n / width, n % width);
        if p > 0 {
            pairs.push((a[p], b[q]));
        }
        cursor = fronts[n][idx].back;
    }
    pairs.reverse();
    let certificate = TimeWarp::through(dom, &pairs)?;
    Ok(TildeDist {
        upper_bound: best,
        certificate,
    })
}

/// Exact Skorohod distance between two step functions on the same interval,
/// with a warp attaining it.
pub fn skorohod_dist_1d_with_warp<T: Scalar>(
    f: &StepFn1D<T>,
    g: &StepFn1D<T>,
) -> Result<(T, TimeWarp<T>)> {
    let r = matching_search(f, g)?;
    Ok((r.upper_bound, r.certificate))
}

pub fn skorohod_dist_1d<T: Scalar>(f: &StepFn1D<T>, g: &StepFn1D<T>) -> Result<T> {
    Ok(matching_search(f, g)?.upper_bound)
}

/// Upper bound on the distance that warps only the first coordinate, with the
/// warp attaining it. Exact when `K2` is empty.
pub fn tilde_dist<T: Scalar>(f: &PiecewiseProcess<T>, g: &PiecewiseProcess<T>) -> Result<TildeDist<T>> {
    matching_search(f, g)
}
