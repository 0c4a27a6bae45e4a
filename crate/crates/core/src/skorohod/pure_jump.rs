// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use super::{check_breaks, skorohod_dist_1d, Interval, StepFn1D};
use crate::error::{ensure, Error, Result};
use crate::num::Scalar;

/// The unit-jump counting function of a jump sequence split at 0:
/// `#{k >= 1 : a_k <= t} + #{k >= 1 : a_{-k} > t}`.
///
/// `jumps_neg` is stored as `a_{-1} > a_{-2} > ...`, `jumps_pos` as `a_1 < a_2 < ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "PureJumpRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct PureJumpFn<T> {
    domain: Interval<T>,
    jumps_neg: Vec<T>,
    jumps_pos: Vec<T>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
struct PureJumpRepr<T> {
    domain: Interval<T>,
    jumps_neg: Vec<T>,
    jumps_pos: Vec<T>,
}

impl<T: Scalar> TryFrom<PureJumpRepr<T>> for PureJumpFn<T> {
    type Error = Error;
    fn try_from(r: PureJumpRepr<T>) -> Result<Self> {
        PureJumpFn::new(r.domain, r.jumps_neg, r.jumps_pos)
    }
}

/// Validates one-sided jump lists and returns all jumps in ascending order.
pub(crate) fn check_sided_jumps<T: Scalar>(
    domain: &Interval<T>,
    jumps_neg: &[T],
    jumps_pos: &[T],
) -> Result<Vec<T>> {
    ensure!(
        domain.contains_interior(T::zero()),
        "0 must lie strictly inside [{}, {}]",
        domain.lo(),
        domain.hi()
    );
    ensure!(
        jumps_neg.iter().all(|&a| a < T::zero()),
        "negative-side jumps must be < 0"
    );
    ensure!(
        jumps_pos.iter().all(|&a| a > T::zero()),
        "positive-side jumps must be > 0"
    );
    let mut all: Vec<T> = jumps_neg.iter().rev().copied().collect();
    all.extend_from_slice(jumps_pos);
    check_breaks(domain, &all, "jump locations")?;
    Ok(all)
}

impl<T: Scalar> PureJumpFn<T> {
    pub fn new(domain: Interval<T>, jumps_neg: Vec<T>, jumps_pos: Vec<T>) -> Result<Self> {
        check_sided_jumps(&domain, &jumps_neg, &jumps_pos)?;
        Ok(Self {
            domain,
            jumps_neg,
            jumps_pos,
        })
    }

    pub fn domain(&self) -> Interval<T> {
        self.domain
    }

    pub fn jumps_neg(&self) -> &[T] {
        &self.jumps_neg
    }

    pub fn jumps_pos(&self) -> &[T] {
        &self.jumps_pos
    }

    pub fn count(&self, t: T) -> Result<usize> {
        self.domain.check(t)?;
        let right = self.jumps_pos.iter().filter(|&&a| a <= t).count();
        let left = self.jumps_neg.iter().filter(|&&a| a > t).count();
        Ok(right + left)
    }

    pub fn eval(&self, t: T) -> Result<T> {
        Ok(T::from_usize(self.count(t)?).expect("jump count fits the scalar type"))
    }

    /// The same function as a step function; stretch `s` carries `|s - N_l|`.
    pub fn to_step(&self) -> StepFn1D<T> {
        let n_left = self.jumps_neg.len();
        let jumps: Vec<T> = self
            .jumps_neg
            .iter()
            .rev()
            .chain(&self.jumps_pos)
            .copied()
            .collect();
        let values = (0..=jumps.len())
            .map(|s| T::from_usize(s.abs_diff(n_left)).expect("jump count fits the scalar type"))
            .collect();
        StepFn1D::new(self.domain, jumps, values).expect("validated jump lists")
    }

    /// Skorohod distance between the two counting functions.
    pub fn distance(&self, other: &Self) -> Result<T> {
        skorohod_dist_1d(&self.to_step(), &other.to_step())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_jumps_away_from_zero() {
        let d = Interval::new(-2.0, 2.0).unwrap();
        let p = PureJumpFn::new(d, vec![-1.5], vec![0.7, 1.2]).unwrap();
        assert_eq!(p.count(0.0).unwrap(), 0);
        assert_eq!(p.count(0.8).unwrap(), 1);
        assert_eq!(p.count(1.3).unwrap(), 2);
        assert_eq!(p.count(-1.6).unwrap(), 1);
        assert_eq!(p.count(-1.5).unwrap(), 0);
        let s = p.to_step();
        for &t in &[-2.0, -1.6, -1.5, 0.0, 0.7, 1.0, 1.2, 2.0] {
            assert_eq!(s.eval(t).unwrap(), p.eval(t).unwrap());
        }
    }

    #[test]
    fn no_jumps_is_identically_zero() {
        let d = Interval::new(-1.0, 1.0).unwrap();
        let p = PureJumpFn::<f64>::new(d, vec![], vec![]).unwrap();
        assert_eq!(p.eval(-1.0).unwrap(), 0.0);
        assert_eq!(p.eval(1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_misordered_sides() {
        let d = Interval::new(-2.0, 2.0).unwrap();
        assert!(PureJumpFn::new(d, vec![-1.0, -0.5], vec![]).is_err());
        assert!(PureJumpFn::new(d, vec![0.5], vec![]).is_err());
        assert!(PureJumpFn::new(d, vec![], vec![0.0]).is_err());
        let off = Interval::new(0.5, 2.0).unwrap();
        assert!(PureJumpFn::<f64>::new(off, vec![], vec![]).is_err());
    }
}
