// SPDX-License-Identifier: MIT OR Apache-2.0

//! Two-sided compound Poisson processes and the quadratic limit form built on them.

use serde::{Deserialize, Serialize};

use crate::changepoint::ChangePointModel;
use crate::error::{ensure, Error, Result};
use crate::linalg;
use crate::rng::SimRng;
use crate::sargmax::maximizer_set_step;
use crate::skorohod::{ContinuousSection, Interval, PiecewiseProcess, Rect, StepFn1D};

/// Centered noise law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorLaw {
    Normal { sigma: f64 },
    /// `scale * T_nu` with `nu > 2`.
    StudentT { nu: f64, scale: f64 },
}

impl ErrorLaw {
    /// Checks parameters; `allow_degenerate` admits a zero scale.
    pub fn validate(&self, allow_degenerate: bool) -> Result<()> {
        let scale = match *self {
            ErrorLaw::Normal { sigma } => sigma,
            ErrorLaw::StudentT { nu, scale } => {
                ensure!(nu.is_finite() && nu > 2.0, "student-t errors need nu > 2, got {nu}");
                scale
            }
        };
        ensure!(scale.is_finite(), "error scale must be finite");
        if allow_degenerate {
            ensure!(scale >= 0.0, "error scale must be nonnegative, got {scale}");
        } else {
            ensure!(scale > 0.0, "error scale must be positive, got {scale}");
        }
        Ok(())
    }

    pub fn is_degenerate(&self) -> bool {
        match *self {
            ErrorLaw::Normal { sigma } => sigma == 0.0,
            ErrorLaw::StudentT { scale, .. } => scale == 0.0,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            ErrorLaw::Normal { sigma } => sigma,
            ErrorLaw::StudentT { nu, scale } => scale * (nu / (nu - 2.0)).sqrt(),
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            ErrorLaw::Normal { sigma } => sigma * rng.normal(),
            ErrorLaw::StudentT { nu, scale } => scale * rng.student_t(nu),
        }
    }
}

/// Law of a single jump of a compound Poisson process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpLaw {
    Normal { mu: f64, sigma: f64 },
    /// `-(c + s * eps)`.
    Shifted { c: f64, s: f64, eps: ErrorLaw },
    PointMass { v: f64 },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpLaw::Normal { mu, sigma } => {
                ensure!(mu.is_finite(), "jump mean must be finite");
                ensure!(sigma.is_finite() && sigma > 0.0, "jump sigma must be positive");
            }
            JumpLaw::Shifted { c, s, eps } => {
                ensure!(c.is_finite() && s.is_finite(), "shifted jump parameters must be finite");
                eps.validate(false)?;
            }
            JumpLaw::PointMass { v } => ensure!(v.is_finite(), "point mass must be finite"),
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            JumpLaw::Normal { mu, .. } => mu,
            JumpLaw::Shifted { c, .. } => -c,
            JumpLaw::PointMass { v } => v,
        }
    }

    /// Root `r > 0` of `E exp(rJ) = 1`; `P(sup of the walk >= u) <= exp(-r u)`.
    ///
    /// Infinite when jumps are never positive, `None` without a moment
    /// generating function (student-t errors).
    pub fn lundberg_exponent(&self) -> Option<f64> {
        let (mean, sd) = match *self {
            JumpLaw::Normal { mu, sigma } => (mu, sigma),
            JumpLaw::Shifted { c, s, eps: ErrorLaw::Normal { sigma } } => (-c, (s * sigma).abs()),
            JumpLaw::Shifted { .. } => return None,
            JumpLaw::PointMass { .. } => return Some(f64::INFINITY),
        };
        Some(if sd == 0.0 { f64::INFINITY } else { -2.0 * mean / (sd * sd) })
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            JumpLaw::Normal { mu, sigma } => mu + sigma * rng.normal(),
            JumpLaw::Shifted { c, s, eps } => -(c + s * eps.sample(rng)),
            JumpLaw::PointMass { v } => v,
        }
    }
}

/// Two-sided compound Poisson process with negative-mean jumps on both sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CppRepr")]
pub struct CompoundPoissonSpec {
    pub rate_pos: f64,
    pub rate_neg: f64,
    pub law_pos: JumpLaw,
    pub law_neg: JumpLaw,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CppRepr {
    rate_pos: f64,
    rate_neg: f64,
    law_pos: JumpLaw,
    law_neg: JumpLaw,
}

impl TryFrom<CppRepr> for CompoundPoissonSpec {
    type Error = Error;
    fn try_from(r: CppRepr) -> Result<Self> {
        CompoundPoissonSpec::new(r.rate_pos, r.rate_neg, r.law_pos, r.law_neg)
    }
}

impl CompoundPoissonSpec {
    pub fn new(rate_pos: f64, rate_neg: f64, law_pos: JumpLaw, law_neg: JumpLaw) -> Result<Self> {
        for rate in [rate_pos, rate_neg] {
            ensure!(rate.is_finite() && rate > 0.0, "event rates must be positive, got {rate}");
        }
        for law in [law_pos, law_neg] {
            law.validate()?;
            ensure!(
                law.mean() < 0.0,
                "jump laws must have negative mean for a finite argmax, got {}",
                law.mean()
            );
        }
        Ok(Self {
            rate_pos,
            rate_neg,
            law_pos,
            law_neg,
        })
    }

    /// `8 / (min rate * min(min |mean jump|, 1))`.
    pub fn default_initial_horizon(&self) -> f64 {
        let rate = self.rate_pos.min(self.rate_neg);
        let drift = self.law_pos.mean().abs().min(self.law_neg.mean().abs()).min(1.0);
        8.0 / (rate * drift)
    }
}

/// Parameters of `Q(t) + v.W - v'Iv/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LimitRepr")]
pub struct LimitProcessSpec {
    pub q: CompoundPoissonSpec,
    pub gauss_cov: Vec<Vec<f64>>,
    pub info: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitRepr {
    q: CompoundPoissonSpec,
    gauss_cov: Vec<Vec<f64>>,
    info: Vec<Vec<f64>>,
}

impl TryFrom<LimitRepr> for LimitProcessSpec {
    type Error = Error;
    fn try_from(r: LimitRepr) -> Result<Self> {
        LimitProcessSpec::new(r.q, r.gauss_cov, r.info)
    }
}

impl LimitProcessSpec {
    pub fn new(q: CompoundPoissonSpec, gauss_cov: Vec<Vec<f64>>, info: Vec<Vec<f64>>) -> Result<Self> {
        let dim = gauss_cov.len();
        ensure!(dim >= 1, "the Gaussian part needs at least one coordinate");
        for (name, m) in [("gauss_cov", &gauss_cov), ("info", &info)] {
            ensure!(
                m.len() == dim && m.iter().all(|r| r.len() == dim),
                "{name} must be {dim}x{dim}"
            );
            ensure!(
                m.iter().flatten().all(|v| v.is_finite()),
                "{name} entries must be finite"
            );
            ensure!(linalg::is_symmetric(m), "{name} must be symmetric");
            ensure!(linalg::is_pd(m), "{name} must be positive definite");
        }
        Ok(Self { q, gauss_cov, info })
    }

    pub fn dim(&self) -> usize {
        self.gauss_cov.len()
    }
}

/// One side of the process: event times and jump sizes, generated lazily.
#[derive(Clone, Debug)]
struct SideStream {
    rng: SimRng,
    rate: f64,
    law: JumpLaw,
    times: Vec<f64>,
    /// `cumulative[i]` is the sum of the first `i + 1` jumps.
    cumulative: Vec<f64>,
}

impl SideStream {
    fn new(rng: SimRng, rate: f64, law: JumpLaw) -> Self {
        Self {
            rng,
            rate,
            law,
            times: Vec::new(),
            cumulative: Vec::new(),
        }
    }

    /// Generates events until one lies at or beyond `reach`.
    fn extend(&mut self, reach: f64) {
        while self.times.last().is_none_or(|&t| t < reach) {
            let t = self.times.last().copied().unwrap_or(0.0) + self.rng.exponential(self.rate);
            let j = self.law.sample(&mut self.rng);
            let c = self.cumulative.last().copied().unwrap_or(0.0) + j;
            self.times.push(t);
            self.cumulative.push(c);
        }
    }

    fn count_below(&self, reach: f64) -> usize {
        self.times.partition_point(|&t| t < reach)
    }
}

/// A two-sided compound Poisson path that can be revealed on growing windows.
///
/// Every window shows the same underlying path, so results computed on
/// different windows are consistent.
#[derive(Clone, Debug)]
pub struct CppPath {
    right: SideStream,
    left: SideStream,
}

impl CppPath {
    pub fn new(spec: &CompoundPoissonSpec, rng: &mut SimRng) -> Self {
        let right = SideStream::new(rng.fork(), spec.rate_pos, spec.law_pos);
        let left = SideStream::new(rng.fork(), spec.rate_neg, spec.law_neg);
        Self { right, left }
    }

    /// Event times `T_1 < T_2 < ...` to the right of 0 revealed so far.
    pub fn right_times(&self) -> &[f64] {
        &self.right.times
    }

    /// Distances `|T_{-1}| < |T_{-2}| < ...` to the left of 0 revealed so far.
    pub fn left_times(&self) -> &[f64] {
        &self.left.times
    }

    /// Makes sure at least `k` events on each side are revealed.
    pub fn reveal_events(&mut self, k: usize) {
        while self.right.times.len() < k {
            let r = self.right.times.last().copied().unwrap_or(0.0) * 2.0 + 1.0;
            self.right.extend(r);
        }
        while self.left.times.len() < k {
            let r = self.left.times.last().copied().unwrap_or(0.0) * 2.0 + 1.0;
            self.left.extend(r);
        }
    }

    /// The path restricted to `domain`, which must contain 0 in its interior.
    ///
    /// `Q = 0` on `[a_{-1}, a_1)`; to the right `Q` adds the jumps at
    /// `a_1, a_2, ...`, to the left it equals `J_{-1} + ... + J_{-k}` on
    /// `[a_{-k-1}, a_{-k})`.
    pub fn window(&mut self, domain: Interval<f64>) -> Result<StepFn1D<f64>> {
        ensure!(
            domain.contains_interior(0.0),
            "a two-sided path needs 0 inside its window"
        );
        self.right.extend(domain.hi());
        self.left.extend(-domain.lo());
        let n_r = self.right.count_below(domain.hi());
        let n_l = self.left.count_below(-domain.lo());
        let mut jumps = Vec::with_capacity(n_l + n_r);
        let mut values = Vec::with_capacity(n_l + n_r + 1);
        for i in (0..n_l).rev() {
            jumps.push(-self.left.times[i]);
            values.push(self.left.cumulative[i]);
        }
        values.push(0.0);
        for i in 0..n_r {
            jumps.push(self.right.times[i]);
            values.push(self.right.cumulative[i]);
        }
        StepFn1D::new(domain, jumps, values)
    }
}

/// A path of the two-sided process on `[-horizon, horizon]`.
pub fn sample_cpp(spec: &CompoundPoissonSpec, horizon: f64, rng: &mut SimRng) -> Result<StepFn1D<f64>> {
    let domain = Interval::new(-horizon, horizon)?;
    CppPath::new(spec, rng).window(domain)
}

/// Draws `Q` on `K1` and one Gaussian `W`; section `k` is `Q_k + v.W - v'Iv/2`.
pub fn sample_limit_process(
    spec: &LimitProcessSpec,
    rect: &Rect<f64>,
    rng: &mut SimRng,
) -> Result<PiecewiseProcess<f64>> {
    ensure!(
        rect.k2().len() == spec.dim(),
        "rectangle has {} continuous axes, the limit form has {}",
        rect.k2().len(),
        spec.dim()
    );
    let q = CppPath::new(&spec.q, rng).window(rect.k1())?;
    let chol = linalg::cholesky(&spec.gauss_cov).expect("validated positive definite");
    let z: Vec<f64> = (0..spec.dim()).map(|_| rng.normal()).collect();
    let w: Vec<f64> = chol
        .iter()
        .map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum())
        .collect();
    let sections = q
        .values()
        .iter()
        .map(|&c| ContinuousSection::Quadratic {
            c,
            w: w.clone(),
            m: spec.info.clone(),
        })
        .collect();
    PiecewiseProcess::from_breaks(rect.clone(), q.jumps(), sections)
}

/// Extreme argmax of a path found by [`sargmax_of_cpp_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdaptiveArgmax {
    pub sargmax: f64,
    pub largmax: f64,
    /// Half-width of the accepted window.
    pub horizon: f64,
}

/// Number of horizon doublings before giving up.
pub const MAX_DOUBLINGS: u32 = 10;

/// Per-side bound on the chance that the path beyond the window overtakes
/// the maximum found inside it.
pub const ADAPTIVE_TAIL_TOL: f64 = 1e-9;

/// Smallest and largest argmax of one path over the whole line.
///
/// The window `[-H, H]` doubles until the maximum over stretches touching
/// `[-(1-b)H, (1-b)H]` strictly exceeds every value on stretches touching the
/// outer buffers, so both argmaxes lie inside the inner window. When the jump
/// law has a Lundberg exponent `r`, the path at each window edge must also sit
/// at least `ln(1/ADAPTIVE_TAIL_TOL) / r` below that maximum; this makes the
/// result independent of `initial_horizon` except on an event of probability
/// at most `2 * ADAPTIVE_TAIL_TOL`.
pub fn sargmax_of_cpp_adaptive(
    spec: &CompoundPoissonSpec,
    rng: &mut SimRng,
    initial_horizon: f64,
    buffer_frac: f64,
) -> Result<AdaptiveArgmax> {
    ensure!(
        initial_horizon.is_finite() && initial_horizon > 0.0,
        "initial horizon must be positive"
    );
    ensure!(
        buffer_frac > 0.0 && buffer_frac < 0.5,
        "buffer fraction must lie in (0, 0.5)"
    );
    let gap = |law: &JumpLaw| match law.lundberg_exponent() {
        Some(r) if r > 0.0 => -ADAPTIVE_TAIL_TOL.ln() / r,
        _ => 0.0,
    };
    let (gap_neg, gap_pos) = (gap(&spec.law_neg), gap(&spec.law_pos));
    let mut path = CppPath::new(spec, rng);
    let mut horizon = initial_horizon;
    for _ in 0..=MAX_DOUBLINGS {
        let q = path.window(Interval::new(-horizon, horizon)?)?;
        let inner = (1.0 - buffer_frac) * horizon;
        let (mut inner_max, mut outer_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let jumps = q.jumps();
        for (s, &v) in q.values().iter().enumerate() {
            let lo = if s == 0 { -horizon } else { jumps[s - 1] };
            let hi = jumps.get(s).copied().unwrap_or(horizon);
            if hi >= -inner && lo <= inner {
                inner_max = inner_max.max(v);
            }
            if lo < -inner || hi > inner {
                outer_max = outer_max.max(v);
            }
        }
        let values = q.values();
        let tails_clear = inner_max - values[0] >= gap_neg
            && inner_max - values[values.len() - 1] >= gap_pos;
        if inner_max > outer_max && tails_clear {
            let r = maximizer_set_step(&q, 0.0)?;
            return Ok(AdaptiveArgmax {
                sargmax: r.sargmax_point[0],
                largmax: r.largmax_point[0],
                horizon,
            });
        }
        horizon *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "argmax not separated from the window edges after {MAX_DOUBLINGS} doublings of {initial_horizon}"
    )))
}

/// Limit law of the localized change-point objective in the jump coordinate.
///
/// An observation on the wrong side of the threshold contributes
/// `(Y - mu_true)^2 - (Y - mu_other)^2 = -(d^2 + 2 d eps)` with `d` the mean
/// gap seen from its true side; crossings occur at rate `f(zeta0)`.
pub fn derive_cp_limit_spec(model: &ChangePointModel) -> Result<CompoundPoissonSpec> {
    let d = model.beta0 - model.alpha0;
    if d == 0.0 {
        return Err(Error::Degenerate("alpha0 = beta0 has no change-point".into()));
    }
    let rate = model.z_law.pdf(model.zeta0);
    let law = |gap: f64| {
        if model.eps_law.is_degenerate() {
            JumpLaw::PointMass { v: -gap * gap }
        } else {
            JumpLaw::Shifted {
                c: gap * gap,
                s: 2.0 * gap,
                eps: model.eps_law,
            }
        }
    };
    CompoundPoissonSpec::new(rate, rate, law(d), law(-d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_mass() -> CompoundPoissonSpec {
        let law = JumpLaw::PointMass { v: -1.0 };
        CompoundPoissonSpec::new(1.0, 1.0, law, law).unwrap()
    }

    #[test]
    fn path_is_zero_on_the_central_stretch() {
        let mut rng = SimRng::seed_from(3);
        let q = sample_cpp(&unit_mass(), 5.0, &mut rng).unwrap();
        assert_eq!(q.eval(0.0).unwrap(), 0.0);
        let jumps = q.jumps();
        let first_pos = jumps.iter().position(|&a| a > 0.0);
        if let Some(p) = first_pos {
            if p > 0 {
                assert_eq!(q.eval(jumps[p - 1]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn windows_of_one_path_agree() {
        let mut rng = SimRng::seed_from(11);
        let mut path = CppPath::new(&unit_mass(), &mut rng);
        let small = path.window(Interval::new(-2.0, 2.0).unwrap()).unwrap();
        let big = path.window(Interval::new(-8.0, 8.0).unwrap()).unwrap();
        for i in 0..=40 {
            let t = -2.0 + 0.1 * i as f64;
            assert_eq!(small.eval(t).unwrap(), big.eval(t).unwrap());
        }
    }

    #[test]
    fn point_mass_argmax_is_the_central_stretch() {
        let mut rng = SimRng::seed_from(5);
        let spec = unit_mass();
        let mut check = rng.clone();
        let r = sargmax_of_cpp_adaptive(&spec, &mut rng, 1.0, 0.1).unwrap();
        let mut path = CppPath::new(&spec, &mut check);
        path.reveal_events(1);
        assert_eq!(r.sargmax, -path.left_times()[0]);
        assert_eq!(r.largmax, path.right_times()[0]);
    }

    #[test]
    fn positive_mean_is_rejected() {
        let up = JumpLaw::PointMass { v: 1.0 };
        assert!(CompoundPoissonSpec::new(1.0, 1.0, up, up).is_err());
        let down = JumpLaw::PointMass { v: -1.0 };
        assert!(CompoundPoissonSpec::new(0.0, 1.0, down, down).is_err());
    }

    #[test]
    fn spec_json_is_validated() {
        let j = r#"{"rate_pos":1.0,"rate_neg":2.0,
            "law_pos":{"kind":"point_mass","v":-1.0},
            "law_neg":{"kind":"shifted","c":1.0,"s":2.0,"eps":{"kind":"normal","sigma":0.5}}}"#;
        let s: CompoundPoissonSpec = serde_json::from_str(j).unwrap();
        assert_eq!(s.law_neg.mean(), -1.0);
        let bad = j.replace("\"v\":-1.0", "\"v\":1.0");
        assert!(serde_json::from_str::<CompoundPoissonSpec>(&bad).is_err());
    }
}
