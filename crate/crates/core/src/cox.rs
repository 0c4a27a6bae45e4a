// SPDX-License-Identifier: MIT OR Apache-2.0

//! Cox regression with a change-point at a threshold in a covariate, for
//! time-fixed covariates: hazard
//! `lambda(t) exp(alpha.Z1 + beta.Z2 1{Z3 <= zeta} + gamma.Z2 1{Z3 > zeta})`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::changepoint::ZLaw;
use crate::error::{ensure, Error, Result};
use crate::io::{csv_err, csv_string, fmt_num};
use crate::linalg;
use crate::rng::SimRng;
use crate::skorohod::Interval;

/// Law of one entry of `Z1` or `Z2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CovLaw {
    Normal { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl CovLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            CovLaw::Normal { mu, sigma } => ensure!(
                mu.is_finite() && sigma.is_finite() && sigma > 0.0,
                "covariate normal law needs finite mu and sigma > 0"
            ),
            CovLaw::Uniform { lo, hi } => ensure!(
                lo.is_finite() && hi.is_finite() && lo < hi,
                "covariate uniform law needs lo < hi"
            ),
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            CovLaw::Normal { mu, sigma } => mu + sigma * rng.normal(),
            CovLaw::Uniform { lo, hi } => rng.uniform_in(lo, hi),
        }
    }
}

/// Law of the censoring time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CensorLaw {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl CensorLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            CensorLaw::Exponential { rate } => ensure!(
                rate.is_finite() && rate > 0.0,
                "censoring rate must be positive"
            ),
            CensorLaw::Uniform { lo, hi } => ensure!(
                lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi,
                "censoring uniform law needs 0 <= lo < hi"
            ),
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            CensorLaw::Exponential { rate } => rng.exponential(rate),
            CensorLaw::Uniform { lo, hi } => rng.uniform_in(lo, hi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoxRepr")]
pub struct CoxThresholdModel {
    pub zeta0: f64,
    /// The closed interval `I` of admissible thresholds.
    pub interval: Interval<f64>,
    pub alpha0: Vec<f64>,
    pub beta0: Vec<f64>,
    pub gamma0: Vec<f64>,
    pub baseline_rate: f64,
    pub censor_law: CensorLaw,
    pub z1_laws: Vec<CovLaw>,
    pub z2_laws: Vec<CovLaw>,
    pub z3_law: ZLaw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoxRepr {
    zeta0: f64,
    interval: Interval<f64>,
    alpha0: Vec<f64>,
    beta0: Vec<f64>,
    gamma0: Vec<f64>,
    baseline_rate: f64,
    censor_law: CensorLaw,
    z1_laws: Vec<CovLaw>,
    z2_laws: Vec<CovLaw>,
    z3_law: ZLaw,
}

impl TryFrom<CoxRepr> for CoxThresholdModel {
    type Error = Error;
    fn try_from(r: CoxRepr) -> Result<Self> {
        let m = CoxThresholdModel {
            zeta0: r.zeta0,
            interval: r.interval,
            alpha0: r.alpha0,
            beta0: r.beta0,
            gamma0: r.gamma0,
            baseline_rate: r.baseline_rate,
            censor_law: r.censor_law,
            z1_laws: r.z1_laws,
            z2_laws: r.z2_laws,
            z3_law: r.z3_law,
        };
        m.validate()?;
        Ok(m)
    }
}

impl CoxThresholdModel {
    /// Structural checks. `beta0 = gamma0` is allowed here (a model without a
    /// change-point can still be simulated and fitted); see [`Self::check_change_point`].
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.interval.contains_interior(self.zeta0),
            "zeta0 must lie strictly inside I"
        );
        self.z3_law.validate()?;
        let (lo, hi) = self.z3_law.support();
        ensure!(
            lo < self.interval.lo() && self.interval.hi() < hi,
            "I must lie strictly inside the support of Z3"
        );
        ensure!(
            self.alpha0.len() == self.z1_laws.len(),
            "alpha0 and z1_laws differ in length"
        );
        ensure!(
            !self.beta0.is_empty()
                && self.beta0.len() == self.gamma0.len()
                && self.beta0.len() == self.z2_laws.len(),
            "beta0, gamma0 and z2_laws need one common nonzero length"
        );
        ensure!(
            self.alpha0
                .iter()
                .chain(&self.beta0)
                .chain(&self.gamma0)
                .all(|v| v.is_finite()),
            "coefficients must be finite"
        );
        ensure!(
            self.baseline_rate.is_finite() && self.baseline_rate > 0.0,
            "baseline rate must be positive"
        );
        self.censor_law.validate()?;
        for law in self.z1_laws.iter().chain(&self.z2_laws) {
            law.validate()?;
        }
        Ok(())
    }

    /// Errors unless the two regimes differ (`beta0 != gamma0`).
    pub fn check_change_point(&self) -> Result<()> {
        if self.beta0 == self.gamma0 {
            return Err(Error::Degenerate(
                "beta0 = gamma0: the hazard has no change-point".into(),
            ));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.alpha0.len()
    }

    pub fn q(&self) -> usize {
        self.beta0.len()
    }
}

/// Right-censored observations with time-fixed covariates.
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalDataset {
    t: Vec<f64>,
    delta: Vec<bool>,
    z1: Vec<Vec<f64>>,
    z2: Vec<Vec<f64>>,
    z3: Vec<f64>,
    /// Row indices by decreasing time.
    order_desc: Vec<usize>,
}

impl SurvivalDataset {
    pub fn new(
        t: Vec<f64>,
        delta: Vec<bool>,
        z1: Vec<Vec<f64>>,
        z2: Vec<Vec<f64>>,
        z3: Vec<f64>,
    ) -> Result<Self> {
        let n = t.len();
        ensure!(n >= 1, "a survival dataset needs at least one row");
        ensure!(
            delta.len() == n && z1.len() == n && z2.len() == n && z3.len() == n,
            "survival columns differ in length"
        );
        let p = z1[0].len();
        let q = z2[0].len();
        ensure!(q >= 1, "Z2 needs at least one column");
        ensure!(
            z1.iter().all(|r| r.len() == p) && z2.iter().all(|r| r.len() == q),
            "covariate rows differ in length"
        );
        ensure!(
            t.iter().all(|&v| v.is_finite() && v >= 0.0),
            "times must be finite and nonnegative"
        );
        ensure!(
            z1.iter().flatten().chain(z2.iter().flatten()).chain(&z3).all(|v| v.is_finite()),
            "covariates must be finite"
        );
        let mut order_desc: Vec<usize> = (0..n).collect();
        order_desc.sort_by(|&a, &b| t[b].total_cmp(&t[a]));
        ensure!(
            order_desc.windows(2).all(|w| t[w[0]] > t[w[1]]),
            "observed times must be pairwise distinct"
        );
        Ok(Self {
            t,
            delta,
            z1,
            z2,
            z3,
            order_desc,
        })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn p(&self) -> usize {
        self.z1[0].len()
    }

    pub fn q(&self) -> usize {
        self.z2[0].len()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn delta(&self) -> &[bool] {
        &self.delta
    }

    pub fn z1(&self) -> &[Vec<f64>] {
        &self.z1
    }

    pub fn z2(&self) -> &[Vec<f64>] {
        &self.z2
    }

    pub fn z3(&self) -> &[f64] {
        &self.z3
    }

    pub fn events(&self) -> usize {
        self.delta.iter().filter(|&&d| d).count()
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string(), "delta".to_string()];
        h.extend((1..=self.p()).map(|i| format!("z1_{i}")));
        h.extend((1..=self.q()).map(|i| format!("z2_{i}")));
        h.push("z3".to_string());
        h
    }

    pub fn to_csv(&self) -> Result<String> {
        let header = self.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        csv_string(
            &header,
            (0..self.len()).map(|i| {
                let mut row = vec![fmt_num(self.t[i]), u8::from(self.delta[i]).to_string()];
                row.extend(self.z1[i].iter().map(|&v| fmt_num(v)));
                row.extend(self.z2[i].iter().map(|&v| fmt_num(v)));
                row.push(fmt_num(self.z3[i]));
                row
            }),
        )
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv()?.as_bytes())?;
        Ok(())
    }

    /// Reads columns `t, delta, z1_1.., z2_1.., z3`, identified by header name.
    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let header: Vec<String> = reader
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let find = |name: &str| header.iter().position(|h| h == name);
        let need = |name: &str| {
            find(name).ok_or_else(|| Error::invalid(format!("CSV is missing column '{name}'")))
        };
        let (it, id, iz3) = (need("t")?, need("delta")?, need("z3")?);
        let cols = |prefix: &str| {
            (1..)
                .map_while(|k| find(&format!("{prefix}_{k}")))
                .collect::<Vec<_>>()
        };
        let (c1, c2) = (cols("z1"), cols("z2"));
        let (mut t, mut delta, mut z1, mut z2, mut z3) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::invalid(format!("row {}: bad value in column {}", line + 2, header[i])))
            };
            t.push(get(it)?);
            let d = get(id)?;
            ensure!(d == 0.0 || d == 1.0, "row {}: delta must be 0 or 1", line + 2);
            delta.push(d == 1.0);
            z1.push(c1.iter().map(|&i| get(i)).collect::<Result<Vec<_>>>()?);
            z2.push(c2.iter().map(|&i| get(i)).collect::<Result<Vec<_>>>()?);
            z3.push(get(iz3)?);
        }
        Self::new(t, delta, z1, z2, z3)
    }
}

/// `n` draws: covariates `Z1, Z2, Z3`, then `T0 ~ Exp(rate e^eta)`, then `C`.
pub fn simulate_cox(model: &CoxThresholdModel, n: usize, rng: &mut SimRng) -> Result<SurvivalDataset> {
    ensure!(n >= 2, "need at least two observations");
    let (mut t, mut delta, mut z1, mut z2, mut z3) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for _ in 0..n {
        let a: Vec<f64> = model.z1_laws.iter().map(|l| l.sample(rng)).collect();
        let b: Vec<f64> = model.z2_laws.iter().map(|l| l.sample(rng)).collect();
        let c = model.z3_law.sample(rng);
        let side = if c <= model.zeta0 { &model.beta0 } else { &model.gamma0 };
        let eta = linalg::dot(&model.alpha0, &a) + linalg::dot(side, &b);
        let t0 = rng.exponential(model.baseline_rate * eta.exp());
        let cens = model.censor_law.sample(rng);
        t.push(t0.min(cens));
        delta.push(t0 <= cens);
        z1.push(a);
        z2.push(b);
        z3.push(c);
    }
    SurvivalDataset::new(t, delta, z1, z2, z3)
}

/// Design rows `(z1, z2 1{z3 <= zeta}, z2 1{z3 > zeta})`, stored row-major
/// by decreasing time.
struct Design {
    d: usize,
    rows: Vec<f64>,
    event: Vec<bool>,
}

impl Design {
    fn new(data: &SurvivalDataset, zeta: f64) -> Self {
        let (p, q) = (data.p(), data.q());
        let d = p + 2 * q;
        let mut rows = Vec::with_capacity(d * data.len());
        for &i in &data.order_desc {
            rows.extend_from_slice(&data.z1[i]);
            let lower = data.z3[i] <= zeta;
            for side in [true, false] {
                rows.extend(data.z2[i].iter().map(|&v| if side == lower { v } else { 0.0 }));
            }
        }
        let event = data.order_desc.iter().map(|&i| data.delta[i]).collect();
        Self { d, rows, event }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.rows[k * self.d..(k + 1) * self.d]
    }

    /// Columns that are not identically zero.
    fn free_columns(&self) -> Vec<usize> {
        (0..self.d)
            .filter(|&a| self.rows.chunks(self.d).any(|r| r[a] != 0.0))
            .collect()
    }
}

struct Derivs {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<Vec<f64>>,
}

/// Neumaier compensated running sum.
#[derive(Clone, Copy, Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn get(self) -> f64 {
        self.sum + self.comp
    }
}

/// Log partial likelihood and, when `second` is set, its gradient and Hessian.
///
/// Risk-set sums run over subjects by decreasing time. The value, the
/// first-moment sums and the gradient use compensated summation: at a few
/// thousand subjects plain sums leave the gradient with rounding noise near
/// `1e-8`. The Hessian only steers Newton steps and uses plain sums.
fn loglik_derivs(x: &Design, xi: &[f64], second: bool) -> Derivs {
    let d = xi.len();
    let n = x.event.len();
    let eta: Vec<f64> = (0..n).map(|k| linalg::dot(x.row(k), xi)).collect();
    let shift = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s0 = Acc::default();
    let mut s1 = vec![Acc::default(); d];
    let mut s2 = vec![vec![0.0; d]; d];
    let mut value = Acc::default();
    let mut grad = vec![Acc::default(); d];
    let mut hess = vec![vec![0.0; d]; d];
    let mut mean = vec![0.0; d];
    for k in 0..n {
        let row = x.row(k);
        let w = (eta[k] - shift).exp();
        s0.add(w);
        if second {
            for a in 0..d {
                let wa = w * row[a];
                s1[a].add(wa);
                for b in 0..=a {
                    s2[a][b] += wa * row[b];
                }
            }
        }
        if x.event[k] {
            let s0v = s0.get();
            value.add(eta[k] - shift - s0v.ln());
            if second {
                for a in 0..d {
                    mean[a] = s1[a].get() / s0v;
                    grad[a].add(row[a] - mean[a]);
                }
                for a in 0..d {
                    for b in 0..=a {
                        hess[a][b] += mean[a] * mean[b] - s2[a][b] / s0v;
                    }
                }
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            hess[b][a] = hess[a][b];
        }
    }
    Derivs {
        value: value.get(),
        grad: grad.iter().map(|g| g.get()).collect(),
        hess,
    }
}

/// `sum over events k of [eta_k - log sum_{t_j >= t_k} exp(eta_j)]`.
pub fn partial_loglik(
    data: &SurvivalDataset,
    zeta: f64,
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
) -> Result<f64> {
    let xi = stack(data, alpha, beta, gamma)?;
    ensure!(data.events() > 0, "the partial likelihood needs at least one event");
    Ok(loglik_derivs(&Design::new(data, zeta), &xi, false).value)
}

/// Gradient and Hessian of [`partial_loglik`] in `(alpha, beta, gamma)`.
pub fn partial_loglik_derivatives(
    data: &SurvivalDataset,
    zeta: f64,
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let xi = stack(data, alpha, beta, gamma)?;
    ensure!(data.events() > 0, "the partial likelihood needs at least one event");
    let d = loglik_derivs(&Design::new(data, zeta), &xi, true);
    Ok((d.value, d.grad, d.hess))
}

fn stack(data: &SurvivalDataset, alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    ensure!(
        alpha.len() == data.p() && beta.len() == data.q() && gamma.len() == data.q(),
        "coefficient lengths do not match the covariates"
    );
    Ok(alpha.iter().chain(beta).chain(gamma).copied().collect())
}

/// Stopping rule of the inner Newton iterations.
pub const GRAD_TOL: f64 = 1e-8;
pub const MAX_NEWTON_ITERS: usize = 100;
/// Coefficient norm beyond which the fit is declared separated.
pub const SEPARATION_NORM: f64 = 1e3;

/// Inner maximization at one threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub zeta: f64,
    pub loglik: f64,
    pub xi: Vec<f64>,
    pub converged: bool,
    pub separated: bool,
    pub iterations: usize,
}

fn norm_on(v: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&a| v[a] * v[a]).sum::<f64>().sqrt()
}

/// Damped Newton ascent in the coefficients at a fixed threshold.
///
/// Coefficients of identically zero design columns stay at 0. Each step is
/// halved (up to 60 times) until the log-likelihood increases, or stays
/// within rounding of its value while the gradient shrinks;
/// when no halving helps, the point counts as converged if the gradient norm
/// is below `1e-6`.
pub fn maximize_at(data: &SurvivalDataset, zeta: f64, start: &[f64]) -> Result<ProfilePoint> {
    ensure!(data.events() > 0, "the partial likelihood needs at least one event");
    let x = Design::new(data, zeta);
    let d = data.p() + 2 * data.q();
    ensure!(start.len() == d, "starting point has the wrong length");
    let free = x.free_columns();
    let mut xi: Vec<f64> = (0..d)
        .map(|a| if free.contains(&a) { start[a] } else { 0.0 })
        .collect();
    let mut cur = loglik_derivs(&x, &xi, true);
    let mut converged = false;
    let mut separated = false;
    let mut iterations = 0;
    while iterations < MAX_NEWTON_ITERS {
        let g: Vec<f64> = free.iter().map(|&a| cur.grad[a]).collect();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < GRAD_TOL {
            converged = true;
            break;
        }
        if xi.iter().map(|v| v * v).sum::<f64>().sqrt() > SEPARATION_NORM {
            separated = true;
            break;
        }
        iterations += 1;
        let neg_h: Vec<Vec<f64>> = free
            .iter()
            .map(|&a| free.iter().map(|&b| -cur.hess[a][b]).collect())
            .collect();
        let step = linalg::solve(&neg_h, &g, 1e-14).unwrap_or_else(|| g.clone());
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = xi.clone();
            for (k, &a) in free.iter().enumerate() {
                trial[a] += t * step[k];
            }
            let next = loglik_derivs(&x, &trial, true);
            let tie = next.value >= cur.value - 1e-13 * (1.0 + cur.value.abs())
                && norm_on(&next.grad, &free) < gnorm;
            if next.value > cur.value || tie {
                accepted = Some((trial, next));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, next)) => {
                xi = trial;
                cur = next;
            }
            None => {
                converged = gnorm < 1e-6;
                break;
            }
        }
    }
    Ok(ProfilePoint {
        zeta,
        loglik: cur.value,
        xi,
        converged,
        separated,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoxFit {
    pub zeta: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub loglik: f64,
    /// Some candidate's coefficients diverged.
    pub separated: bool,
    /// Candidates whose inner maximization did not converge (excluded).
    pub failed_candidates: usize,
    pub profile: Vec<ProfilePoint>,
}

/// Smallest maximizer over `I x R^{p+2q}` of the partial log-likelihood.
///
/// Thresholds are profiled over `I.lo` and the observed `z3` in `I`, which
/// are the left ends of the stretches on which the likelihood is constant in
/// the threshold. Each inner maximization is warm-started at the previous
/// candidate's solution.
pub fn fit_cox_threshold(data: &SurvivalDataset, interval: Interval<f64>) -> Result<CoxFit> {
    ensure!(data.events() > 0, "the partial likelihood needs at least one event");
    let mut zs: Vec<f64> = data
        .z3
        .iter()
        .copied()
        .filter(|&z| z > interval.lo() && z <= interval.hi())
        .collect();
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    let mut candidates = vec![interval.lo()];
    candidates.extend(zs);

    let d = data.p() + 2 * data.q();
    let mut start = vec![0.0; d];
    let mut profile = Vec::with_capacity(candidates.len());
    for &zeta in &candidates {
        let pt = maximize_at(data, zeta, &start)?;
        if pt.converged {
            start.clone_from(&pt.xi);
        }
        profile.push(pt);
    }
    let failed_candidates = profile.iter().filter(|p| !p.converged && !p.separated).count();
    let separated = profile.iter().any(|p| p.separated);
    let best = profile
        .iter()
        .filter(|p| p.converged || p.separated)
        .fold(None::<&ProfilePoint>, |b, p| match b {
            Some(b) if b.loglik >= p.loglik => Some(b),
            _ => Some(p),
        })
        .ok_or_else(|| Error::NonConvergence("Newton failed at every candidate threshold".into()))?;
    let (p, q) = (data.p(), data.q());
    Ok(CoxFit {
        zeta: best.zeta,
        alpha: best.xi[..p].to_vec(),
        beta: best.xi[p..p + q].to_vec(),
        gamma: best.xi[p + q..].to_vec(),
        loglik: best.loglik,
        separated,
        failed_candidates,
        profile,
    })
}
