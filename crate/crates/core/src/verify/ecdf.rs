// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::Serialize;

use crate::error::{ensure, Result};

/// Empirical distribution function of a finite sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        ensure!(!samples.is_empty(), "an ECDF needs at least one sample");
        ensure!(samples.iter().all(|v| !v.is_nan()), "ECDF samples must not be NaN");
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `F(x) = #{samples <= x} / N`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `F(x-) = #{samples < x} / N`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    /// Sample quantile with linear interpolation between order statistics
    /// (Hyndman-Fan type 7).
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let h = (self.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(self.len() - 1);
        self.sorted[lo] + (h - lo as f64) * (self.sorted[hi] - self.sorted[lo])
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
///
/// Both the value and the left limit are compared at every merged sample
/// point, which covers every place the difference can change.
pub fn ks_distance(a: &Ecdf, b: &Ecdf) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.sorted.get(i), b.sorted.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        // left limits: counts strictly below x
        best = best.max((i as f64 / na - j as f64 / nb).abs());
        while a.sorted.get(i).is_some_and(|&u| u <= x) {
            i += 1;
        }
        while b.sorted.get(j).is_some_and(|&v| v <= x) {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}
