// SPDX-License-Identifier: MIT OR Apache-2.0

//! Finite representations of Skorohod-space functions.
//!
//! Every function here is a step function in its first coordinate `t` whose
//! flat stretches carry a continuous [`ContinuousSection`] over the remaining
//! coordinates. Stretches are half-open `[a_k, a_{k+1})` and the last one is
//! closed at the right end of the domain, so evaluation is right-continuous
//! with left limits.

mod metric;
mod process;
mod pure_jump;
mod section;
mod step;
mod warp;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::num::Scalar;

pub use metric::{
    skorohod_dist_1d, skorohod_dist_1d_with_warp, sup_dist, tilde_dist, warp_objective, StretchFunction,
    TildeDist,
};
pub use process::PiecewiseProcess;
pub use pure_jump::PureJumpFn;
pub use section::{ContinuousSection, SectionMax, MAX_FACE_ENUM_DIM};
pub use step::StepFn1D;
pub use warp::TimeWarp;

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "IntervalRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

#[derive(Deserialize)]
struct IntervalRepr<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> TryFrom<IntervalRepr<T>> for Interval<T> {
    type Error = Error;
    fn try_from(r: IntervalRepr<T>) -> Result<Self> {
        Interval::new(r.lo, r.hi)
    }
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        ensure!(
            lo.is_finite() && hi.is_finite() && lo < hi,
            "interval needs finite lo < hi, got [{lo}, {hi}]"
        );
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn len(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, t: T) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn contains_interior(&self, t: T) -> bool {
        self.lo < t && t < self.hi
    }

    pub(crate) fn check(&self, t: T) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain {
                point: t.as_f64(),
                lo: self.lo.as_f64(),
                hi: self.hi.as_f64(),
            })
        }
    }
}

/// A compact rectangle `K = K1 x K2`; `axes[0]` is the jump coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RectRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct Rect<T> {
    axes: Vec<Interval<T>>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct RectRepr<T> {
    axes: Vec<Interval<T>>,
}

impl<T: Scalar> TryFrom<RectRepr<T>> for Rect<T> {
    type Error = Error;
    fn try_from(r: RectRepr<T>) -> Result<Self> {
        Rect::new(r.axes)
    }
}

impl<T: Scalar> Rect<T> {
    pub fn new(axes: Vec<Interval<T>>) -> Result<Self> {
        ensure!(!axes.is_empty(), "a rectangle needs at least one axis");
        Ok(Self { axes })
    }

    /// `K1 x K2` from the jump axis and the continuous axes.
    pub fn split(k1: Interval<T>, k2: &[Interval<T>]) -> Self {
        let mut axes = Vec::with_capacity(k2.len() + 1);
        axes.push(k1);
        axes.extend_from_slice(k2);
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval<T>] {
        &self.axes
    }

    pub fn k1(&self) -> Interval<T> {
        self.axes[0]
    }

    pub fn k2(&self) -> &[Interval<T>] {
        &self.axes[1..]
    }

    pub(crate) fn check_k2(&self, xi: &[T]) -> Result<()> {
        ensure!(
            xi.len() == self.axes.len() - 1,
            "point has {} continuous coordinates, rectangle has {}",
            xi.len(),
            self.axes.len() - 1
        );
        for (x, axis) in xi.iter().zip(self.k2()) {
            axis.check(*x)?;
        }
        Ok(())
    }
}

/// Index of the stretch `[b_{s-1}, b_s)` containing `t`, for ascending interior
/// breakpoints `breaks`; the right end of the domain belongs to the last stretch.
pub(crate) fn stretch_index<T: Scalar>(breaks: &[T], t: T) -> usize {
    breaks.partition_point(|&b| b <= t)
}

pub(crate) fn check_breaks<T: Scalar>(domain: &Interval<T>, breaks: &[T], what: &str) -> Result<()> {
    for w in breaks.windows(2) {
        ensure!(w[0] < w[1], "{what} must be strictly increasing");
    }
    for &b in breaks {
        ensure!(
            domain.contains_interior(b),
            "{what}: {b} is not strictly inside [{}, {}]",
            domain.lo(),
            domain.hi()
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_degenerate() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let i = Interval::new(-1.0f32, 2.0).unwrap();
        assert_eq!(i.len(), 3.0);
    }

    #[test]
    fn interval_json_is_validated() {
        let ok: Interval<f64> = serde_json::from_str(r#"{"lo":0,"hi":1}"#).unwrap();
        assert_eq!(ok.hi(), 1.0);
        assert!(serde_json::from_str::<Interval<f64>>(r#"{"lo":1,"hi":0}"#).is_err());
    }

    #[test]
    fn stretch_index_is_right_continuous() {
        let b = [1.0, 2.0];
        assert_eq!(stretch_index(&b, 0.5), 0);
        assert_eq!(stretch_index(&b, 1.0), 1);
        assert_eq!(stretch_index(&b, 2.5), 2);
    }
}
