// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{ensure, Error, Result};
use crate::num::Scalar;

/// A strictly increasing piecewise-linear bijection of an interval onto itself.
///
/// `knots` holds `(s, lambda(s))` pairs, starting at `(lo, lo)` and ending at `(hi, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "WarpRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct TimeWarp<T> {
    domain: Interval<T>,
    knots: Vec<(T, T)>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct WarpRepr<T> {
    domain: Interval<T>,
    knots: Vec<(T, T)>,
}

impl<T: Scalar> TryFrom<WarpRepr<T>> for TimeWarp<T> {
    type Error = Error;
    fn try_from(r: WarpRepr<T>) -> Result<Self> {
        TimeWarp::new(r.domain, r.knots)
    }
}

impl<T: Scalar> TimeWarp<T> {
    pub fn new(domain: Interval<T>, knots: Vec<(T, T)>) -> Result<Self> {
        ensure!(knots.len() >= 2, "a warp needs at least its two endpoint knots");
        let (first, last) = (knots[0], knots[knots.len() - 1]);
        ensure!(
            first == (domain.lo(), domain.lo()) && last == (domain.hi(), domain.hi()),
            "a warp must fix both endpoints of its domain"
        );
        for w in knots.windows(2) {
            ensure!(
                w[0].0 < w[1].0 && w[0].1 < w[1].1,
                "warp knots must be strictly increasing in both coordinates"
            );
        }
        Ok(Self { domain, knots })
    }

    pub fn identity(domain: Interval<T>) -> Self {
        Self {
            domain,
            knots: vec![(domain.lo(), domain.lo()), (domain.hi(), domain.hi())],
        }
    }

    /// The warp interpolating the given interior pairs plus both endpoints.
    pub fn through(domain: Interval<T>, pairs: &[(T, T)]) -> Result<Self> {
        let mut knots = Vec::with_capacity(pairs.len() + 2);
        knots.push((domain.lo(), domain.lo()));
        knots.extend_from_slice(pairs);
        knots.push((domain.hi(), domain.hi()));
        Self::new(domain, knots)
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.domain.check(t)?;
        let i = self.knots.partition_point(|k| k.0 < t);
        let (s_b, l_b) = self.knots[i];
        if s_b == t {
            return Ok(l_b);
        }
        let (s_a, l_a) = self.knots[i - 1];
        Ok(l_a + (t - s_a) * (l_b - l_a) / (s_b - s_a))
    }

    /// `lambda^{-1}(y)`; knot values map back to their knots exactly.
    pub fn inverse(&self, y: T) -> T {
        let i = self
            .knots
            .partition_point(|k| k.1 < y)
            .clamp(1, self.knots.len() - 1);
        let (s_b, l_b) = self.knots[i];
        if l_b == y {
            return s_b;
        }
        let (s_a, l_a) = self.knots[i - 1];
        if l_a == y {
            return s_a;
        }
        s_a + (y - l_a) * (s_b - s_a) / (l_b - l_a)
    }

    /// `sup |log((lambda(t) - lambda(s)) / (t - s))|`, attained on a single segment.
    pub fn norm(&self) -> T {
        self.knots
            .windows(2)
            .map(|w| segment_log_slope(w[0], w[1]))
            .fold(T::zero(), T::max)
    }

    /// `sup_t |lambda(t) - t|`, attained at a knot.
    pub fn displacement(&self) -> T {
        self.knots
            .iter()
            .map(|&(s, l)| (l - s).abs())
            .fold(T::zero(), T::max)
    }
}

/// `|log(slope)|` of the segment between two knots.
pub(crate) fn segment_log_slope<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    ((b.1 - a.1) / (b.0 - a.0)).ln().abs()
}
