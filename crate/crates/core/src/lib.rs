// SPDX-License-Identifier: MIT OR Apache-2.0

//! Smallest and largest argmax functionals on step-in-time processes.
//!
//! The geometric layers ([`skorohod`], [`sargmax`]) are generic over the
//! scalar type; the aliases below fix it to `f64`. The stochastic layers
//! ([`processes`], [`changepoint`], [`cox`], [`verify`]) work in `f64`.

#![allow(clippy::needless_range_loop)]

pub mod changepoint;
pub mod cox;
pub mod error;
pub mod io;
pub mod linalg;
pub mod num;
pub mod processes;
pub mod rng;
pub mod sargmax;
pub mod skorohod;
pub mod verify;

pub use error::{Error, Result};
pub use num::Scalar;
pub use rng::{mix_seed, SimRng};

pub type Interval = skorohod::Interval<f64>;
pub type Rect = skorohod::Rect<f64>;
pub type StepFn = skorohod::StepFn1D<f64>;
pub type Process = skorohod::PiecewiseProcess<f64>;
pub type Section = skorohod::ContinuousSection<f64>;
pub type Warp = skorohod::TimeWarp<f64>;
pub type PureJump = skorohod::PureJumpFn<f64>;
pub type Report = sargmax::MaximizerReport<f64>;
