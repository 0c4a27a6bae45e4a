// SPDX-License-Identifier: MIT OR Apache-2.0

//! Least-squares change-point regression with a random design:
//! `Y = alpha0 1{Z <= zeta0} + beta0 1{Z > zeta0} + eps`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{ensure, Error, Result};
use crate::io::{csv_err, csv_string, fmt_num};
use crate::processes::ErrorLaw;
use crate::rng::SimRng;
use crate::skorohod::{ContinuousSection, PiecewiseProcess, PureJumpFn, Rect};

/// Law of the design variable `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZLaw {
    Uniform { lo: f64, hi: f64 },
    /// Normal(mu, sigma) conditioned on `[lo, hi]`.
    TruncNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
}

impl ZLaw {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.support();
        ensure!(
            lo.is_finite() && hi.is_finite() && lo < hi,
            "design support must be a finite interval"
        );
        if let ZLaw::TruncNormal { mu, sigma, .. } = *self {
            ensure!(mu.is_finite(), "design mean must be finite");
            ensure!(sigma.is_finite() && sigma > 0.0, "design sigma must be positive");
            ensure!(self.mass() > 0.0, "truncation interval carries no probability");
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            ZLaw::Uniform { lo, hi } | ZLaw::TruncNormal { lo, hi, .. } => (lo, hi),
        }
    }

    fn normal(&self) -> Option<Normal> {
        match *self {
            ZLaw::TruncNormal { mu, sigma, .. } => Some(Normal::new(mu, sigma).expect("validated")),
            ZLaw::Uniform { .. } => None,
        }
    }

    fn mass(&self) -> f64 {
        let (lo, hi) = self.support();
        self.normal().map_or(1.0, |n| n.cdf(hi) - n.cdf(lo))
    }

    pub fn pdf(&self, z: f64) -> f64 {
        let (lo, hi) = self.support();
        if z < lo || z > hi {
            return 0.0;
        }
        match self.normal() {
            None => 1.0 / (hi - lo),
            Some(n) => n.pdf(z) / self.mass(),
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let (lo, hi) = self.support();
        if z <= lo {
            return 0.0;
        }
        if z >= hi {
            return 1.0;
        }
        match self.normal() {
            None => (z - lo) / (hi - lo),
            Some(n) => (n.cdf(z) - n.cdf(lo)) / self.mass(),
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        let (lo, hi) = self.support();
        let u = rng.uniform_open();
        match self.normal() {
            None => lo + (hi - lo) * u,
            Some(n) => {
                let (a, b) = (n.cdf(lo), n.cdf(hi));
                n.inverse_cdf(a + u * (b - a)).clamp(lo, hi)
            }
        }
    }
}

/// The regression model with parameter space `[c1, c2] x R^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr")]
pub struct ChangePointModel {
    pub zeta0: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub c1: f64,
    pub c2: f64,
    pub z_law: ZLaw,
    pub eps_law: ErrorLaw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    zeta0: f64,
    alpha0: f64,
    beta0: f64,
    c1: f64,
    c2: f64,
    z_law: ZLaw,
    eps_law: ErrorLaw,
}

impl TryFrom<ModelRepr> for ChangePointModel {
    type Error = Error;
    fn try_from(r: ModelRepr) -> Result<Self> {
        let m = ChangePointModel {
            zeta0: r.zeta0,
            alpha0: r.alpha0,
            beta0: r.beta0,
            c1: r.c1,
            c2: r.c2,
            z_law: r.z_law,
            eps_law: r.eps_law,
        };
        m.validate()?;
        Ok(m)
    }
}

impl ChangePointModel {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            [self.zeta0, self.alpha0, self.beta0, self.c1, self.c2]
                .iter()
                .all(|v| v.is_finite()),
            "model parameters must be finite"
        );
        ensure!(
            self.c1 < self.zeta0 && self.zeta0 < self.c2,
            "need c1 < zeta0 < c2, got {} < {} < {}",
            self.c1,
            self.zeta0,
            self.c2
        );
        if self.alpha0 == self.beta0 {
            return Err(Error::Degenerate("alpha0 = beta0 has no change-point".into()));
        }
        self.z_law.validate()?;
        let (lo, hi) = self.z_law.support();
        ensure!(
            lo < self.c1 && self.c2 < hi,
            "the design must put mass below c1 and above c2"
        );
        ensure!(
            self.z_law.pdf(self.zeta0) > 0.0,
            "design density must be positive at zeta0"
        );
        self.eps_law.validate(true)
    }

    fn mean_at(&self, z: f64) -> f64 {
        if z <= self.zeta0 {
            self.alpha0
        } else {
            self.beta0
        }
    }
}

/// Observations `(y_i, z_i)` with pairwise distinct `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    y: Vec<f64>,
    z: Vec<f64>,
    order: Vec<usize>,
}

impl Dataset {
    pub fn new(y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        ensure!(y.len() == z.len(), "y and z have different lengths");
        ensure!(!y.is_empty(), "a dataset needs at least one row");
        ensure!(
            y.iter().chain(&z).all(|v| v.is_finite()),
            "dataset values must be finite"
        );
        let mut order: Vec<usize> = (0..z.len()).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
        ensure!(
            order.windows(2).all(|w| z[w[0]] < z[w[1]]),
            "design values must be pairwise distinct"
        );
        Ok(Self { y, z, order })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Row indices sorted by `z`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn to_csv(&self) -> Result<String> {
        csv_string(
            &["y", "z"],
            self.y.iter().zip(&self.z).map(|(&y, &z)| vec![fmt_num(y), fmt_num(z)]),
        )
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv()?.as_bytes())?;
        Ok(())
    }

    /// Reads a CSV with a header naming columns `y` and `z` (any order).
    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers().map_err(csv_err)?.clone();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::invalid(format!("CSV is missing column '{name}'")))
        };
        let (iy, iz) = (col("y")?, col("z")?);
        let (mut y, mut z) = (Vec::new(), Vec::new());
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let parse = |i: usize, name: &str| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::invalid(format!("row {}: bad '{name}' value", line + 2)))
            };
            y.push(parse(iy, "y")?);
            z.push(parse(iz, "z")?);
        }
        Self::new(y, z)
    }
}

/// `n` draws from the model; each row draws `z` first, then the error.
pub fn simulate_cp(model: &ChangePointModel, n: usize, rng: &mut SimRng) -> Result<Dataset> {
    ensure!(n >= 2, "need at least two observations");
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        let zi = model.z_law.sample(rng);
        let e = model.eps_law.sample(rng);
        y.push(model.mean_at(zi) + e);
        z.push(zi);
    }
    Dataset::new(y, z)
}

/// `-(1/n) sum (y_i - alpha 1{z_i <= zeta} - beta 1{z_i > zeta})^2`.
pub fn objective_mn(data: &Dataset, zeta: f64, alpha: f64, beta: f64) -> f64 {
    let ss: f64 = data
        .y
        .iter()
        .zip(&data.z)
        .map(|(&y, &z)| {
            let r = y - if z <= zeta { alpha } else { beta };
            r * r
        })
        .sum();
    -ss / data.len() as f64
}

/// Sample means of `y` on each side of `zeta`; an empty side gets the overall mean.
pub fn side_means(data: &Dataset, zeta: f64) -> (f64, f64) {
    let (mut sl, mut nl, mut sr, mut nr) = (0.0, 0usize, 0.0, 0usize);
    for (&y, &z) in data.y.iter().zip(&data.z) {
        if z <= zeta {
            sl += y;
            nl += 1;
        } else {
            sr += y;
            nr += 1;
        }
    }
    let overall = (sl + sr) / data.len() as f64;
    let mean = |s: f64, k: usize| if k == 0 { overall } else { s / k as f64 };
    (mean(sl, nl), mean(sr, nr))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpEstimate {
    pub zeta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub objective: f64,
}

/// Smallest maximizer of the profiled least-squares criterion over `[c1, c2]`.
///
/// The criterion is constant on `[Z_(j), Z_(j+1))`, so `c1` and the observed
/// `z` in `[c1, c2]` enumerate every stretch by its left end. A prefix-sum
/// scan shortlists near-maximal candidates; those are rescored with
/// [`objective_mn`] at their side means, which decides the result.
pub fn fit_cp(data: &Dataset, c1: f64, c2: f64) -> Result<CpEstimate> {
    ensure!(c1.is_finite() && c2.is_finite() && c1 < c2, "need c1 < c2");
    let n = data.len();
    let sorted_y: Vec<f64> = data.order.iter().map(|&i| data.y[i]).collect();
    let sorted_z: Vec<f64> = data.order.iter().map(|&i| data.z[i]).collect();
    let total: f64 = sorted_y.iter().sum();
    let total_sq: f64 = sorted_y.iter().map(|y| y * y).sum();

    // (zeta, number of points on the left)
    let mut candidates = vec![(c1, sorted_z.partition_point(|&z| z <= c1))];
    for (j, &z) in sorted_z.iter().enumerate() {
        if z > c1 && z <= c2 {
            candidates.push((z, j + 1));
        }
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &y in &sorted_y {
        prefix.push(prefix.last().unwrap() + y);
    }
    let explained = |nl: usize| {
        let sl = prefix[nl];
        let sr = total - sl;
        let part = |s: f64, k: usize| if k == 0 { 0.0 } else { s * s / k as f64 };
        if nl == 0 || nl == n {
            total * total / n as f64
        } else {
            part(sl, nl) + part(sr, n - nl)
        }
    };
    let approx: Vec<f64> = candidates
        .iter()
        .map(|&(_, nl)| -(total_sq - explained(nl)) / n as f64)
        .collect();
    let top = approx.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + total_sq / n as f64);

    let mut best: Option<CpEstimate> = None;
    for (&(zeta, _), &a) in candidates.iter().zip(&approx) {
        if a < top - tol {
            continue;
        }
        let (alpha, beta) = side_means(data, zeta);
        let objective = objective_mn(data, zeta, alpha, beta);
        if best.is_none_or(|b| objective > b.objective) {
            best = Some(CpEstimate {
                zeta,
                alpha,
                beta,
                objective,
            });
        }
    }
    Ok(best.expect("c1 is always a candidate"))
}

/// The localized objective `h -> n P_n[m_{theta0 + (h1/n, h2/sqrt n, h3/sqrt n)} - m_theta0]`
/// on the window `h`, with its pure-jump function.
///
/// Sections are exact quadratics in `(h2, h3)`: with `L` the points left of the
/// shifted threshold, `w = 2 / sqrt(n) (sum_L (y - alpha0), sum_R (y - beta0))`,
/// `M = diag(2|L|/n, 2|R|/n)`, and the constant sums
/// `(y - mu0)^2 - (y - mu_other)^2` over the points on the wrong side.
pub fn localized_process(
    data: &Dataset,
    model: &ChangePointModel,
    h: &Rect<f64>,
) -> Result<(PiecewiseProcess<f64>, PureJumpFn<f64>)> {
    ensure!(h.dim() == 3, "the localized window has axes (h1, h2, h3)");
    let n = data.len();
    let nf = n as f64;
    let k1 = h.k1();
    ensure!(
        k1.contains_interior(0.0),
        "the h1 window must contain 0 in its interior"
    );
    ensure!(
        model.zeta0 + k1.lo() / nf >= model.c1 && model.zeta0 + k1.hi() / nf <= model.c2,
        "h1 window [{}, {}] leaves [c1, c2] at n = {n}",
        k1.lo(),
        k1.hi()
    );
    let (a0, b0) = (model.alpha0, model.beta0);
    let sqrt_n = nf.sqrt();

    // crossing location and contribution of each point, in z order
    let mut sl0 = 0.0;
    let mut sr0 = 0.0;
    let mut nl0 = 0usize;
    let mut neg = Vec::new(); // (b, index), true-left points inside the window
    let mut pos = Vec::new();
    for &i in &data.order {
        let (y, z) = (data.y[i], data.z[i]);
        let b = nf * (z - model.zeta0);
        ensure!(b != 0.0, "an observation sits exactly at zeta0");
        if b < 0.0 {
            sl0 += y - a0;
            nl0 += 1;
            if b > k1.lo() {
                neg.push((b, i));
            }
        } else {
            sr0 += y - b0;
            if b < k1.hi() {
                pos.push((b, i));
            }
        }
    }
    neg.reverse();
    let section = |c: f64, sl: f64, sr: f64, nl: usize| {
        let nr = n - nl;
        ContinuousSection::Quadratic {
            c,
            w: vec![2.0 * sl / sqrt_n, 2.0 * sr / sqrt_n],
            m: vec![
                vec![2.0 * nl as f64 / nf, 0.0],
                vec![0.0, 2.0 * nr as f64 / nf],
            ],
        }
    };

    let mut left_sections = Vec::with_capacity(neg.len());
    let (mut c, mut sl, mut sr, mut nl) = (0.0, sl0, sr0, nl0);
    for &(_, i) in &neg {
        let y = data.y[i];
        c += (y - a0).powi(2) - (y - b0).powi(2);
        sl -= y - a0;
        sr += y - b0;
        nl -= 1;
        left_sections.push(section(c, sl, sr, nl));
    }
    let mut sections: Vec<ContinuousSection<f64>> = left_sections.into_iter().rev().collect();
    sections.push(section(0.0, sl0, sr0, nl0));
    let (mut c, mut sl, mut sr, mut nl) = (0.0, sl0, sr0, nl0);
    for &(_, i) in &pos {
        let y = data.y[i];
        c += (y - b0).powi(2) - (y - a0).powi(2);
        sl += y - a0;
        sr -= y - b0;
        nl += 1;
        sections.push(section(c, sl, sr, nl));
    }
    let psi = PiecewiseProcess::new(
        h.clone(),
        neg.iter().map(|&(b, _)| b).collect(),
        pos.iter().map(|&(b, _)| b).collect(),
        sections,
    )?;
    let jumps = psi.pure_jump();
    Ok((psi, jumps))
}
