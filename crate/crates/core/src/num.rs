// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the function-space code is generic over (`f32` or `f64`).
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal; every literal used in this crate is representable.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the scalar type")
    }

    /// Absolute/relative slack used when comparing values that went through
    /// different but algebraically equivalent evaluation paths.
    fn slack(scale: Self) -> Self {
        Self::epsilon() * Self::lit(256.0) * (Self::one() + scale.abs())
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lexicographic comparison of two points, coordinate by coordinate.
pub fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    a.len().cmp(&b.len())
}
