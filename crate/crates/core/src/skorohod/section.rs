// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{ensure, Result};
use crate::linalg;
use crate::num::{lex_cmp, Scalar};

/// Up to this many continuous coordinates, box-constrained quadratics are
/// solved exactly by enumerating all `3^m` faces of the box.
pub const MAX_FACE_ENUM_DIM: usize = 3;

/// Upper bound on the number of mesh points used when a grid section is
/// compared against a curved quadratic section.
const DENSE_MESH_POINTS: f64 = 65536.0;

/// A continuous function of the non-jump coordinates.
///
/// * `Const` is the only kind allowed when `K2` is empty (d = 1).
/// * `Quadratic` is `c + w.xi - xi' M xi / 2` with `M` symmetric positive semidefinite.
/// * `Grid` is the multilinear interpolant of `values` on the tensor grid `grid`;
///   `values` is row-major with the last axis varying fastest, and each axis of
///   `grid` must start and end exactly at the corresponding edge of `K2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    bound(deserialize = "T: Scalar + Deserialize<'de>")
)]
pub enum ContinuousSection<T> {
    Const {
        c: T,
    },
    Quadratic {
        c: T,
        w: Vec<T>,
        #[serde(rename = "M")]
        m: Vec<Vec<T>>,
    },
    Grid {
        grid: Vec<Vec<T>>,
        values: Vec<T>,
    },
}

/// Supremum of a section over `K2` with its extreme maximizers.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionMax<T> {
    pub sup: T,
    /// Lexicographically smallest maximizer.
    pub first: Vec<T>,
    /// Lexicographically largest maximizer.
    pub last: Vec<T>,
    pub unique: bool,
}

/// `c + w.x - x'Mx/2` with no sign restriction on `M`.
#[derive(Clone, Debug)]
struct QuadForm<T> {
    c: T,
    w: Vec<T>,
    m: Vec<Vec<T>>,
}

impl<T: Scalar> QuadForm<T> {
    fn eval(&self, x: &[T]) -> T {
        let mx = linalg::mat_vec(&self.m, x);
        self.c + linalg::dot(&self.w, x) - T::lit(0.5) * linalg::dot(x, &mx)
    }

    fn sub(&self, other: &Self) -> Self {
        QuadForm {
            c: self.c - other.c,
            w: self.w.iter().zip(&other.w).map(|(&a, &b)| a - b).collect(),
            m: self
                .m
                .iter()
                .zip(&other.m)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(&a, &b)| a - b).collect())
                .collect(),
        }
    }

    /// Stationary points of the form restricted to every face of the box,
    /// including all vertices. Faces whose reduced Hessian is singular are
    /// skipped: their extrema are attained on lower-dimensional faces.
    fn face_candidates(&self, bounds: &[Interval<T>]) -> Vec<Vec<T>> {
        let dim = bounds.len();
        let mut out = Vec::new();
        let faces = 3usize.pow(dim as u32);
        let rel_tol = T::epsilon() * T::lit(1e4);
        for code in 0..faces {
            let mut state = Vec::with_capacity(dim);
            let mut rest = code;
            for _ in 0..dim {
                state.push(rest % 3);
                rest /= 3;
            }
            let mut x: Vec<T> = (0..dim)
                .map(|i| match state[i] {
                    0 => bounds[i].lo(),
                    1 => bounds[i].hi(),
                    _ => T::zero(),
                })
                .collect();
            let free: Vec<usize> = (0..dim).filter(|&i| state[i] == 2).collect();
            if !free.is_empty() {
                let a: Vec<Vec<T>> = free
                    .iter()
                    .map(|&i| free.iter().map(|&j| self.m[i][j]).collect())
                    .collect();
                let b: Vec<T> = free
                    .iter()
                    .map(|&i| {
                        let mut v = self.w[i];
                        for j in 0..dim {
                            if state[j] != 2 {
                                v = v - self.m[i][j] * x[j];
                            }
                        }
                        v
                    })
                    .collect();
                let Some(sol) = linalg::solve(&a, &b, rel_tol) else {
                    continue;
                };
                let mut inside = true;
                for (&i, &v) in free.iter().zip(&sol) {
                    let slack = T::slack(bounds[i].len());
                    if !v.is_finite() || v < bounds[i].lo() - slack || v > bounds[i].hi() + slack {
                        inside = false;
                        break;
                    }
                    x[i] = v.max(bounds[i].lo()).min(bounds[i].hi());
                }
                if !inside {
                    continue;
                }
            }
            out.push(x);
        }
        out
    }

    /// Projected gradient ascent for concave forms too large to enumerate.
    fn projected_ascent(&self, bounds: &[Interval<T>]) -> Vec<T> {
        let frob = self
            .m
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |s, v| s + *v * *v)
            .sqrt();
        let step = T::one() / (frob + T::epsilon());
        let mut x: Vec<T> = bounds
            .iter()
            .map(|b| (b.lo() + b.hi()) * T::lit(0.5))
            .collect();
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(16.0));
        for _ in 0..1_000_000 {
            let mx = linalg::mat_vec(&self.m, &x);
            let mut moved = T::zero();
            for i in 0..x.len() {
                let g = self.w[i] - mx[i];
                let next = (x[i] + step * g).max(bounds[i].lo()).min(bounds[i].hi());
                let d = (next - x[i]) / step;
                moved = moved + d * d;
                x[i] = next;
            }
            if moved.sqrt() < tol {
                break;
            }
        }
        x
    }
}

fn close<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let tol = T::epsilon().sqrt();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| (x - y).abs() <= tol * (T::one() + x.abs().max(y.abs())))
}

impl<T: Scalar> ContinuousSection<T> {
    pub fn constant(c: T) -> Self {
        Self::Const { c }
    }

    pub fn quadratic(c: T, w: Vec<T>, m: Vec<Vec<T>>) -> Result<Self> {
        let s = Self::Quadratic { c, w, m };
        s.validate_shape()?;
        Ok(s)
    }

    pub fn grid(grid: Vec<Vec<T>>, values: Vec<T>) -> Result<Self> {
        let s = Self::Grid { grid, values };
        s.validate_shape()?;
        Ok(s)
    }

    /// Number of continuous coordinates the section expects, if it constrains it.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Const { .. } => None,
            Self::Quadratic { w, .. } => Some(w.len()),
            Self::Grid { grid, .. } => Some(grid.len()),
        }
    }

    fn validate_shape(&self) -> Result<()> {
        match self {
            Self::Const { c } => ensure!(c.is_finite(), "section constant must be finite"),
            Self::Quadratic { c, w, m } => {
                ensure!(c.is_finite(), "section constant must be finite");
                ensure!(
                    m.len() == w.len() && m.iter().all(|r| r.len() == w.len()),
                    "quadratic section: M must be {0}x{0}",
                    w.len()
                );
                ensure!(
                    w.iter().chain(m.iter().flatten()).all(|v| v.is_finite()),
                    "quadratic section entries must be finite"
                );
                ensure!(linalg::is_symmetric(m), "quadratic section: M must be symmetric");
                ensure!(
                    linalg::is_psd(m),
                    "quadratic section: M must be positive semidefinite"
                );
            }
            Self::Grid { grid, values } => {
                let mut count = 1usize;
                for axis in grid {
                    ensure!(axis.len() >= 2, "grid axes need at least two points");
                    ensure!(
                        axis.windows(2).all(|w| w[0] < w[1]),
                        "grid axes must be strictly increasing"
                    );
                    count *= axis.len();
                }
                ensure!(
                    values.len() == count,
                    "grid section has {} values, expected {count}",
                    values.len()
                );
                ensure!(values.iter().all(|v| v.is_finite()), "grid values must be finite");
            }
        }
        Ok(())
    }

    /// Checks the section against the continuous part `K2` of its rectangle.
    pub(crate) fn validate(&self, k2: &[Interval<T>]) -> Result<()> {
        self.validate_shape()?;
        if let Some(d) = self.dim() {
            ensure!(
                d == k2.len(),
                "section has {d} continuous coordinates, rectangle has {}",
                k2.len()
            );
        }
        if k2.is_empty() {
            ensure!(
                matches!(self, Self::Const { .. }),
                "one-dimensional processes take constant sections only"
            );
        }
        if let Self::Grid { grid, .. } = self {
            for (axis, b) in grid.iter().zip(k2) {
                ensure!(
                    axis[0] == b.lo() && axis[axis.len() - 1] == b.hi(),
                    "grid axis must span [{}, {}] exactly",
                    b.lo(),
                    b.hi()
                );
            }
        }
        Ok(())
    }

    /// Evaluates at a point of `K2`; the point is assumed to be inside the box.
    pub fn eval(&self, xi: &[T]) -> T {
        match self {
            Self::Const { c } => *c,
            Self::Quadratic { c, w, m } => {
                let mx = linalg::mat_vec(m, xi);
                *c + linalg::dot(w, xi) - T::lit(0.5) * linalg::dot(xi, &mx)
            }
            Self::Grid { grid, values } => multilinear(grid, values, xi),
        }
    }

    /// The same section plus a constant.
    pub fn shifted(&self, delta: T) -> Self {
        match self {
            Self::Const { c } => Self::Const { c: *c + delta },
            Self::Quadratic { c, w, m } => Self::Quadratic {
                c: *c + delta,
                w: w.clone(),
                m: m.clone(),
            },
            Self::Grid { grid, values } => Self::Grid {
                grid: grid.clone(),
                values: values.iter().map(|&v| v + delta).collect(),
            },
        }
    }

    fn as_quad(&self, dim: usize) -> Option<QuadForm<T>> {
        match self {
            Self::Const { c } => Some(QuadForm {
                c: *c,
                w: vec![T::zero(); dim],
                m: vec![vec![T::zero(); dim]; dim],
            }),
            Self::Quadratic { c, w, m } => Some(QuadForm {
                c: *c,
                w: w.clone(),
                m: m.clone(),
            }),
            Self::Grid { .. } => None,
        }
    }

    /// Supremum over `K2` with the lexicographically smallest and largest maximizers.
    pub fn maximize(&self, k2: &[Interval<T>]) -> SectionMax<T> {
        match self {
            Self::Grid { grid, values } => grid_max(grid, values),
            _ => {
                let q = self.as_quad(k2.len()).expect("non-grid section");
                if k2.len() > MAX_FACE_ENUM_DIM {
                    let x = q.projected_ascent(k2);
                    return SectionMax {
                        sup: q.eval(&x),
                        first: x.clone(),
                        last: x,
                        unique: linalg::is_pd(&q.m),
                    };
                }
                let scored: Vec<(Vec<T>, T)> = q
                    .face_candidates(k2)
                    .into_iter()
                    .map(|x| {
                        let v = q.eval(&x);
                        (x, v)
                    })
                    .collect();
                let sup = scored
                    .iter()
                    .fold(T::neg_infinity(), |m, (_, v)| m.max(*v));
                let cut = sup - T::slack(sup);
                let mut winners = scored.into_iter().filter(|(_, v)| *v >= cut).map(|(x, _)| x);
                let init = winners.next().expect("the box has vertices");
                let (first, last) = winners.fold((init.clone(), init), |(lo, hi), x| {
                    let lo = if lex_cmp(&x, &lo).is_lt() { x.clone() } else { lo };
                    let hi = if lex_cmp(&x, &hi).is_gt() { x } else { hi };
                    (lo, hi)
                });
                let unique = close(&first, &last);
                SectionMax {
                    sup,
                    first,
                    last,
                    unique,
                }
            }
        }
    }

    /// `sup_{xi in K2} |self(xi) - other(xi)|`.
    ///
    /// Exact when neither section is a grid and `K2` has at most
    /// [`MAX_FACE_ENUM_DIM`] axes (face enumeration of the difference quadratic),
    /// and when neither is a curved quadratic (the difference is multilinear on
    /// the merged grid, so vertices suffice). Everything else is evaluated on a
    /// dense mesh of at most 65536 points merged with any grid coordinates.
    pub fn sup_abs_diff(&self, other: &Self, k2: &[Interval<T>]) -> T {
        let dim = k2.len();
        if dim <= MAX_FACE_ENUM_DIM {
            if let (Some(a), Some(b)) = (self.as_quad(dim), other.as_quad(dim)) {
                let d = a.sub(&b);
                return d
                    .face_candidates(k2)
                    .iter()
                    .fold(T::zero(), |m, x| m.max(d.eval(x).abs()));
            }
        }
        let curved = |s: &Self| matches!(s, Self::Quadratic { .. });
        let mut axes: Vec<Vec<T>> = k2.iter().map(|b| vec![b.lo(), b.hi()]).collect();
        for s in [self, other] {
            if let Self::Grid { grid, .. } = s {
                for (axis, g) in axes.iter_mut().zip(grid) {
                    axis.extend_from_slice(g);
                }
            }
        }
        if curved(self) || curved(other) {
            let per_axis = DENSE_MESH_POINTS.powf(1.0 / dim.max(1) as f64).floor().max(2.0) as usize;
            for (axis, b) in axes.iter_mut().zip(k2) {
                for i in 0..per_axis {
                    let frac = T::from_usize(i).unwrap() / T::from_usize(per_axis - 1).unwrap();
                    axis.push(b.lo() + frac * b.len());
                }
            }
        }
        for axis in axes.iter_mut() {
            axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
            axis.dedup();
        }
        let mut best = T::zero();
        for_each_vertex(&axes, |x| {
            best = best.max((self.eval(x) - other.eval(x)).abs());
        });
        best
    }
}

/// Calls `f` on every point of the tensor grid, last axis fastest.
pub(crate) fn for_each_vertex<T: Scalar>(axes: &[Vec<T>], mut f: impl FnMut(&[T])) {
    let mut idx = vec![0usize; axes.len()];
    let mut x: Vec<T> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&x);
        let mut k = axes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                x[k] = axes[k][idx[k]];
                break;
            }
            idx[k] = 0;
            x[k] = axes[k][0];
        }
    }
}

fn multilinear<T: Scalar>(grid: &[Vec<T>], values: &[T], xi: &[T]) -> T {
    let dim = grid.len();
    let mut cell = Vec::with_capacity(dim);
    let mut frac = Vec::with_capacity(dim);
    for (axis, &x) in grid.iter().zip(xi) {
        let i = axis
            .partition_point(|&g| g <= x)
            .saturating_sub(1)
            .min(axis.len() - 2);
        let f = ((x - axis[i]) / (axis[i + 1] - axis[i])).max(T::zero()).min(T::one());
        cell.push(i);
        frac.push(f);
    }
    let mut strides = vec![1usize; dim];
    for k in (0..dim.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * grid[k + 1].len();
    }
    let mut acc = T::zero();
    for corner in 0..(1usize << dim) {
        let mut weight = T::one();
        let mut flat = 0usize;
        for k in 0..dim {
            let up = (corner >> k) & 1 == 1;
            weight = weight * if up { frac[k] } else { T::one() - frac[k] };
            flat += (cell[k] + usize::from(up)) * strides[k];
        }
        if weight != T::zero() {
            acc = acc + weight * values[flat];
        }
    }
    acc
}

/// A multilinear interpolant attains its maximum exactly on the faces whose
/// vertices all carry the maximal value, so vertex scanning is exact.
fn grid_max<T: Scalar>(grid: &[Vec<T>], values: &[T]) -> SectionMax<T> {
    let sup = values.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let mut hits = Vec::new();
    let mut flat = 0usize;
    for_each_vertex(grid, |x| {
        if values[flat] == sup {
            hits.push(x.to_vec());
        }
        flat += 1;
    });
    let unique = hits.len() == 1;
    let first = hits.first().cloned().unwrap_or_default();
    let last = hits.last().cloned().unwrap_or_default();
    SectionMax {
        sup,
        first,
        last,
        unique,
    }
}
