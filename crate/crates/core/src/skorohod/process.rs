// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use super::pure_jump::check_sided_jumps;
use super::step::ensure_same_domain;
use super::{stretch_index, ContinuousSection, Interval, PureJumpFn, Rect, StepFn1D, TimeWarp};
use crate::error::{ensure, Error, Result};
use crate::num::Scalar;

/// A process that is a step function in `t` with a continuous section over
/// `K2` on every stretch.
///
/// `sections[s]` is `V_k` for `k = s - N_l`, so `sections[N_l]` covers
/// `[a_{-1}, a_1)`. The point `a_0 = 0` is only an index anchor: sections on
/// either side of it may coincide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ProcessRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct PiecewiseProcess<T> {
    rect: Rect<T>,
    jumps_neg: Vec<T>,
    jumps_pos: Vec<T>,
    sections: Vec<ContinuousSection<T>>,
    #[serde(skip)]
    breaks: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct ProcessRepr<T> {
    rect: Rect<T>,
    jumps_neg: Vec<T>,
    jumps_pos: Vec<T>,
    sections: Vec<ContinuousSection<T>>,
}

impl<T: Scalar> TryFrom<ProcessRepr<T>> for PiecewiseProcess<T> {
    type Error = Error;
    fn try_from(r: ProcessRepr<T>) -> Result<Self> {
        PiecewiseProcess::new(r.rect, r.jumps_neg, r.jumps_pos, r.sections)
    }
}

impl<T: Scalar> PiecewiseProcess<T> {
    pub fn new(
        rect: Rect<T>,
        jumps_neg: Vec<T>,
        jumps_pos: Vec<T>,
        sections: Vec<ContinuousSection<T>>,
    ) -> Result<Self> {
        let breaks = check_sided_jumps(&rect.k1(), &jumps_neg, &jumps_pos)?;
        ensure!(
            sections.len() == breaks.len() + 1,
            "{} jumps need {} sections, got {}",
            breaks.len(),
            breaks.len() + 1,
            sections.len()
        );
        for s in &sections {
            s.validate(rect.k2())?;
        }
        Ok(Self {
            rect,
            jumps_neg,
            jumps_pos,
            sections,
            breaks,
        })
    }

    /// Builds from ascending breakpoints, splitting them at 0.
    pub fn from_breaks(rect: Rect<T>, breaks: &[T], sections: Vec<ContinuousSection<T>>) -> Result<Self> {
        ensure!(
            !breaks.iter().any(|&b| b == T::zero()),
            "a jump at 0 cannot be assigned to either side"
        );
        let neg = breaks.iter().rev().copied().filter(|&b| b < T::zero()).collect();
        let pos = breaks.iter().copied().filter(|&b| b > T::zero()).collect();
        Self::new(rect, neg, pos, sections)
    }

    /// The one-dimensional process with constant sections equal to `f`'s values.
    pub fn from_step(f: &StepFn1D<T>) -> Result<Self> {
        let sections = f
            .values()
            .iter()
            .map(|&c| ContinuousSection::constant(c))
            .collect();
        Self::from_breaks(Rect::split(f.domain(), &[]), f.jumps(), sections)
    }

    /// The step function in `t` when `K2` is empty.
    pub fn to_step(&self) -> Result<StepFn1D<T>> {
        ensure!(
            self.rect.dim() == 1,
            "only one-dimensional processes are step functions"
        );
        let values = self
            .sections
            .iter()
            .map(|s| match s {
                ContinuousSection::Const { c } => *c,
                _ => unreachable!("validated: d = 1 sections are constant"),
            })
            .collect();
        StepFn1D::new(self.rect.k1(), self.breaks.clone(), values)
    }

    pub fn rect(&self) -> &Rect<T> {
        &self.rect
    }

    pub fn jumps_neg(&self) -> &[T] {
        &self.jumps_neg
    }

    pub fn jumps_pos(&self) -> &[T] {
        &self.jumps_pos
    }

    pub fn sections(&self) -> &[ContinuousSection<T>] {
        &self.sections
    }

    /// All jump locations in ascending order.
    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn n_left(&self) -> usize {
        self.jumps_neg.len()
    }

    pub fn n_right(&self) -> usize {
        self.jumps_pos.len()
    }

    /// `V_k` for `k` in `-N_l ..= N_r`.
    pub fn section(&self, k: isize) -> Option<&ContinuousSection<T>> {
        let s = k + self.n_left() as isize;
        usize::try_from(s).ok().and_then(|s| self.sections.get(s))
    }

    /// Signed index `k` of the section stored at position `s`.
    pub fn section_index(&self, s: usize) -> isize {
        s as isize - self.n_left() as isize
    }

    /// Closure `[a_k, a_{k+1}]` of the stretch stored at position `s`.
    pub fn stretch(&self, s: usize) -> Interval<T> {
        let lo = if s == 0 { self.rect.k1().lo() } else { self.breaks[s - 1] };
        let hi = self.breaks.get(s).copied().unwrap_or(self.rect.k1().hi());
        Interval::new(lo, hi).expect("breaks are strictly increasing")
    }

    pub fn eval(&self, t: T, xi: &[T]) -> Result<T> {
        self.rect.k1().check(t)?;
        self.rect.check_k2(xi)?;
        Ok(self.sections[stretch_index(&self.breaks, t)].eval(xi))
    }

    /// Limit from the left in `t` (the value itself at `lo`).
    pub fn eval_left(&self, t: T, xi: &[T]) -> Result<T> {
        self.rect.k1().check(t)?;
        self.rect.check_k2(xi)?;
        Ok(self.sections[self.breaks.partition_point(|&b| b < t)].eval(xi))
    }

    /// Pure-jump function of the stored jump lists.
    pub fn pure_jump(&self) -> PureJumpFn<T> {
        PureJumpFn::new(self.rect.k1(), self.jumps_neg.clone(), self.jumps_pos.clone())
            .expect("validated jump lists")
    }

    /// `(t, xi) -> psi(lambda(t), xi)`.
    pub fn apply_warp(&self, warp: &TimeWarp<T>) -> Result<Self> {
        ensure_same_domain(self.rect.k1(), warp.domain())?;
        let breaks: Vec<T> = self.breaks.iter().map(|&b| warp.inverse(b)).collect();
        Self::from_breaks(self.rect.clone(), &breaks, self.sections.clone())
    }

    /// Adds `delta` to every section.
    pub fn shifted(&self, delta: T) -> Self {
        Self {
            sections: self.sections.iter().map(|s| s.shifted(delta)).collect(),
            ..self.clone()
        }
    }

    /// The same process with the given sections in place of the stored ones.
    pub fn with_sections(&self, sections: Vec<ContinuousSection<T>>) -> Result<Self> {
        Self::new(
            self.rect.clone(),
            self.jumps_neg.clone(),
            self.jumps_pos.clone(),
            sections,
        )
    }
}
