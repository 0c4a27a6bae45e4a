// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use super::{check_breaks, stretch_index, Interval, PureJumpFn, TimeWarp};
use crate::error::{ensure, Error, Result};
use crate::num::Scalar;

/// A right-continuous step function on a compact interval with finitely many
/// jumps, all strictly inside the domain.
///
/// `f(t) = values[j]` on `[jumps[j-1], jumps[j])` with the conventions
/// `jumps[-1] = lo`, and the last stretch is closed at `hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "StepRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct StepFn1D<T> {
    domain: Interval<T>,
    jumps: Vec<T>,
    values: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct StepRepr<T> {
    domain: Interval<T>,
    jumps: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<StepRepr<T>> for StepFn1D<T> {
    type Error = Error;
    fn try_from(r: StepRepr<T>) -> Result<Self> {
        StepFn1D::new(r.domain, r.jumps, r.values)
    }
}

impl<T: Scalar> StepFn1D<T> {
    pub fn new(domain: Interval<T>, jumps: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_breaks(&domain, &jumps, "step function jumps")?;
        ensure!(
            values.len() == jumps.len() + 1,
            "step function with {} jumps needs {} values, got {}",
            jumps.len(),
            jumps.len() + 1,
            values.len()
        );
        ensure!(
            values.iter().all(|v| v.is_finite()),
            "step function values must be finite"
        );
        Ok(Self {
            domain,
            jumps,
            values,
        })
    }

    pub fn constant(domain: Interval<T>, value: T) -> Self {
        Self {
            domain,
            jumps: Vec::new(),
            values: vec![value],
        }
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn jumps(&self) -> &[T] {
        &self.jumps
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn eval(&self, t: T) -> Result<T> {
        self.domain.check(t)?;
        Ok(self.values[stretch_index(&self.jumps, t)])
    }

    /// `(left limit, right limit)` at `t`; at `lo` the left limit is `f(lo)`.
    pub fn quadrant_limits(&self, t: T) -> Result<(T, T)> {
        self.domain.check(t)?;
        let right = stretch_index(&self.jumps, t);
        let left = self.jumps.partition_point(|&b| b < t);
        Ok((self.values[left], self.values[right]))
    }

    /// The same function with adjacent equal values merged, so that every
    /// stored jump is an actual discontinuity.
    pub fn canonical(&self) -> Self {
        let mut jumps = Vec::with_capacity(self.jumps.len());
        let mut values = vec![self.values[0]];
        for (&b, &v) in self.jumps.iter().zip(&self.values[1..]) {
            if v != *values.last().unwrap() {
                jumps.push(b);
                values.push(v);
            }
        }
        Self {
            domain: self.domain,
            jumps,
            values,
        }
    }

    /// Pure-jump function of the actual discontinuities, split at 0.
    pub fn pure_jump(&self) -> Result<PureJumpFn<T>> {
        let c = self.canonical();
        ensure!(
            !c.jumps.iter().any(|&b| b == T::zero()),
            "a discontinuity at 0 cannot be assigned to either side"
        );
        let mut neg: Vec<T> = c.jumps.iter().copied().filter(|&b| b < T::zero()).collect();
        neg.reverse();
        let pos = c.jumps.iter().copied().filter(|&b| b > T::zero()).collect();
        PureJumpFn::new(self.domain, neg, pos)
    }

    /// `t -> f(lambda(t))`: the values are kept and each jump moves to its preimage.
    pub fn apply_warp(&self, warp: &TimeWarp<T>) -> Result<Self> {
        ensure_same_domain(self.domain, warp.domain())?;
        let jumps = self.jumps.iter().map(|&b| warp.inverse(b)).collect();
        Self::new(self.domain, jumps, self.values.clone())
    }

    /// `sup_t |f(t) - g(t)|`, exact over the merged partition.
    pub fn sup_dist(&self, other: &Self) -> Result<T> {
        super::sup_dist(self, other)
    }

    /// Adds `delta` to every value.
    pub fn shifted(&self, delta: T) -> Self {
        Self {
            domain: self.domain,
            jumps: self.jumps.clone(),
            values: self.values.iter().map(|&v| v + delta).collect(),
        }
    }

    /// Pointwise sum, defined on the merged jump set.
    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_domain(self.domain, other.domain)?;
        let mut jumps: Vec<T> = self.jumps.iter().chain(&other.jumps).copied().collect();
        jumps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        jumps.dedup();
        let mut values = Vec::with_capacity(jumps.len() + 1);
        values.push(self.values[0] + other.values[0]);
        for &b in &jumps {
            values.push(
                self.values[stretch_index(&self.jumps, b)]
                    + other.values[stretch_index(&other.jumps, b)],
            );
        }
        Self::new(self.domain, jumps, values)
    }
}

pub(crate) fn ensure_same_domain<T: Scalar>(a: Interval<T>, b: Interval<T>) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Mismatch(format!(
            "[{}, {}] vs [{}, {}]",
            a.lo(),
            a.hi(),
            b.lo(),
            b.hi()
        )))
    }
}
