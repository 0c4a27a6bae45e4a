// SPDX-License-Identifier: MIT OR Apache-2.0

//! Maximizer sets and the smallest/largest argmax functionals.
//!
//! A point `(t, xi)` is a maximizer when one of its quadrant limits equals the
//! supremum. For a step-in-`t` process the left limit at `a_{k+1}` is
//! `V_k(xi)`, so every attaining stretch contributes its closure. Points are
//! ordered lexicographically with `t` first and the `K2` axes in storage order.

use serde::Serialize;

use crate::error::{ensure, Result};
use crate::num::Scalar;
use crate::skorohod::{ContinuousSection, Interval, PiecewiseProcess, SectionMax, StepFn1D};

/// A maximal run of stretches attaining the supremum with one common section.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatMax<T> {
    pub stretch_closed: Interval<T>,
    /// Signed index `k` of the first stretch of the run.
    pub section_index: isize,
    pub sup_value: T,
    /// Lexicographically smallest maximizer of the section over `K2`.
    pub section_argmax: Vec<T>,
    /// Lexicographically largest maximizer of the section over `K2`.
    pub section_argmax_last: Vec<T>,
    pub section_unique: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximizerReport<T> {
    pub global_sup: T,
    pub flats: Vec<FlatMax<T>>,
    pub sargmax_point: Vec<T>,
    pub largmax_point: Vec<T>,
    pub unique_flat: bool,
}

struct Stretch<'a, T> {
    closure: Interval<T>,
    index: isize,
    section: &'a ContinuousSection<T>,
    max: SectionMax<T>,
}

fn report<T: Scalar>(stretches: Vec<Stretch<'_, T>>, tie_tol: T) -> MaximizerReport<T> {
    let global_sup = stretches
        .iter()
        .fold(T::neg_infinity(), |m, s| m.max(s.max.sup));
    let mut flats: Vec<FlatMax<T>> = Vec::new();
    let mut prev: Option<&ContinuousSection<T>> = None;
    for s in &stretches {
        if s.max.sup < global_sup - tie_tol {
            prev = None;
            continue;
        }
        match (flats.last_mut(), prev) {
            (Some(last), Some(p)) if p == s.section => {
                last.stretch_closed = Interval::new(last.stretch_closed.lo(), s.closure.hi())
                    .expect("stretches are ordered");
            }
            _ => flats.push(FlatMax {
                stretch_closed: s.closure,
                section_index: s.index,
                sup_value: s.max.sup,
                section_argmax: s.max.first.clone(),
                section_argmax_last: s.max.last.clone(),
                section_unique: s.max.unique,
            }),
        }
        prev = Some(s.section);
    }
    let first = flats.first().expect("some stretch attains the maximum");
    let last = flats.last().expect("some stretch attains the maximum");
    let mut sargmax_point = vec![first.stretch_closed.lo()];
    sargmax_point.extend_from_slice(&first.section_argmax);
    let mut largmax_point = vec![last.stretch_closed.hi()];
    largmax_point.extend_from_slice(&last.section_argmax_last);
    let unique_flat = flats.len() == 1 && flats[0].section_unique;
    MaximizerReport {
        global_sup,
        flats,
        sargmax_point,
        largmax_point,
        unique_flat,
    }
}

/// Supremum, attaining flats and the extreme maximizers of `psi`.
///
/// Stretches whose section supremum is within `tie_tol` of the global one
/// count as attaining; adjacent attaining stretches merge into one flat only
/// when their sections are identical.
pub fn maximizer_set<T: Scalar>(psi: &PiecewiseProcess<T>, tie_tol: T) -> Result<MaximizerReport<T>> {
    ensure!(tie_tol >= T::zero(), "tie tolerance must be nonnegative");
    let k2 = psi.rect().k2();
    let stretches = psi
        .sections()
        .iter()
        .enumerate()
        .map(|(s, section)| Stretch {
            closure: psi.stretch(s),
            index: psi.section_index(s),
            section,
            max: section.maximize(k2),
        })
        .collect();
    Ok(report(stretches, tie_tol))
}

pub fn sargmax<T: Scalar>(psi: &PiecewiseProcess<T>) -> Vec<T> {
    maximizer_set(psi, T::zero()).expect("zero tolerance").sargmax_point
}

pub fn largmax<T: Scalar>(psi: &PiecewiseProcess<T>) -> Vec<T> {
    maximizer_set(psi, T::zero()).expect("zero tolerance").largmax_point
}

/// True when exactly one flat attains the supremum and its section has a
/// unique maximizer over `K2`.
pub fn check_unique_flat_max<T: Scalar>(psi: &PiecewiseProcess<T>, tie_tol: T) -> Result<bool> {
    Ok(maximizer_set(psi, tie_tol)?.unique_flat)
}

/// Maximizer report of a step function; section indices are storage positions.
pub fn maximizer_set_step<T: Scalar>(f: &StepFn1D<T>, tie_tol: T) -> Result<MaximizerReport<T>> {
    ensure!(tie_tol >= T::zero(), "tie tolerance must be nonnegative");
    let sections: Vec<ContinuousSection<T>> = f
        .values()
        .iter()
        .map(|&c| ContinuousSection::constant(c))
        .collect();
    let jumps = f.jumps();
    let dom = f.domain();
    let stretches = sections
        .iter()
        .enumerate()
        .map(|(s, section)| {
            let lo = if s == 0 { dom.lo() } else { jumps[s - 1] };
            let hi = jumps.get(s).copied().unwrap_or(dom.hi());
            Stretch {
                closure: Interval::new(lo, hi).expect("validated jumps"),
                index: s as isize,
                section,
                max: section.maximize(&[]),
            }
        })
        .collect();
    Ok(report(stretches, tie_tol))
}

pub fn sargmax_step<T: Scalar>(f: &StepFn1D<T>) -> T {
    maximizer_set_step(f, T::zero()).expect("zero tolerance").sargmax_point[0]
}

pub fn largmax_step<T: Scalar>(f: &StepFn1D<T>) -> T {
    maximizer_set_step(f, T::zero()).expect("zero tolerance").largmax_point[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skorohod::Rect;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::new(lo, hi).unwrap()
    }

    fn consts(v: &[f64]) -> Vec<ContinuousSection<f64>> {
        v.iter().map(|&c| ContinuousSection::constant(c)).collect()
    }

    #[test]
    fn equal_neighbours_merge_into_one_flat() {
        let psi = PiecewiseProcess::from_breaks(
            Rect::split(iv(-2.0, 2.0), &[]),
            &[-1.0, 0.5, 1.0],
            consts(&[0.0, 3.0, 3.0, 1.0]),
        )
        .unwrap();
        let r = maximizer_set(&psi, 0.0).unwrap();
        assert_eq!(r.global_sup, 3.0);
        assert_eq!(r.flats.len(), 1);
        assert_eq!(r.flats[0].stretch_closed, iv(-1.0, 1.0));
        assert_eq!(r.sargmax_point, vec![-1.0]);
        assert_eq!(r.largmax_point, vec![1.0]);
        assert!(r.unique_flat);
    }

    #[test]
    fn constant_process_spans_the_rectangle() {
        let psi = PiecewiseProcess::new(
            Rect::split(iv(-1.0, 1.0), &[iv(0.0, 2.0)]),
            vec![],
            vec![],
            consts(&[4.0]),
        )
        .unwrap();
        assert_eq!(sargmax(&psi), vec![-1.0, 0.0]);
        assert_eq!(largmax(&psi), vec![1.0, 2.0]);
        assert!(!check_unique_flat_max(&psi, 0.0).unwrap());
    }

    #[test]
    fn quadratic_winner_is_unique() {
        let q = |c| ContinuousSection::quadratic(c, vec![0.0], vec![vec![1.0]]).unwrap();
        let psi = PiecewiseProcess::new(
            Rect::split(iv(-2.0, 2.0), &[iv(-1.0, 1.0)]),
            vec![],
            vec![1.0],
            vec![q(1.0), q(0.5)],
        )
        .unwrap();
        let r = maximizer_set(&psi, 0.0).unwrap();
        assert!(r.unique_flat);
        assert_eq!(r.sargmax_point, vec![-2.0, 0.0]);
        assert_eq!(r.largmax_point, vec![1.0, 0.0]);
    }

    #[test]
    fn exact_ties_are_two_flats() {
        let psi = PiecewiseProcess::from_breaks(
            Rect::split(iv(-2.0, 2.0), &[]),
            &[-1.0, 1.0],
            consts(&[1.0, 0.0, 1.0]),
        )
        .unwrap();
        let r = maximizer_set(&psi, 0.0).unwrap();
        assert_eq!(r.flats.len(), 2);
        assert!(!r.unique_flat);
        assert_eq!(r.sargmax_point, vec![-2.0]);
        assert_eq!(r.largmax_point, vec![2.0]);
        let strict = PiecewiseProcess::from_breaks(
            Rect::split(iv(-2.0, 2.0), &[]),
            &[-1.0, 1.0],
            consts(&[1.0, 0.5, 0.2]),
        )
        .unwrap();
        assert!(check_unique_flat_max(&strict, 0.0).unwrap());
    }

    #[test]
    fn indicator_step_function() {
        let f = StepFn1D::new(iv(0.0, 1.0), vec![0.3, 0.7], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(sargmax_step(&f), 0.3);
        assert_eq!(largmax_step(&f), 0.7);
        let c = StepFn1D::constant(iv(0.0, 1.0), 0.0);
        assert_eq!(sargmax_step(&c), 0.0);
        assert_eq!(largmax_step(&c), 1.0);
    }
}
