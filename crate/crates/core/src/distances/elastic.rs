//! Dynamic-programming engine for the elastic kinds.
//!
//! Every kind is written as a min-plus recurrence over an `(n+1) x (m+1)`
//! grid with a padded boundary row and column. The full-matrix driver and
//! the two-row driver evaluate cells with identical arithmetic in identical
//! order, so `cost_matrix(..)[n][m]` and `distance(..)` agree bit-for-bit.
//!
//! EDR and LCSS accumulate integer counts (LCSS as negated match counts) and
//! are normalised only when a value leaves the engine.

use super::{DistanceKind, DistanceSpec};
use crate::data::SeriesView;
use crate::error::{Error, Result};

/// A series rearranged point-major, after any derivative transform.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    len: usize,
    dim: usize,
    points: Vec<f64>,
}

impl Prepared {
    pub(crate) fn new(series: SeriesView<'_>, spec: &DistanceSpec) -> Result<Self> {
        let dim = series.n_channels();
        let n = series.n_timepoints();
        let mut points = vec![0.0; n * dim];
        for c in 0..dim {
            for (t, &v) in series.channel(c).iter().enumerate() {
                points[t * dim + c] = v;
            }
        }
        let raw = Self { len: n, dim, points };
        if spec.kind.uses_derivative() {
            raw.derivative()
        } else {
            Ok(raw)
        }
    }

    /// `d_t = ((x_t - x_{t-1}) + (x_{t+1} - x_{t-1}) / 2) / 2` for `t in 1..n-1`.
    fn derivative(&self) -> Result<Self> {
        if self.len < 3 {
            return Err(Error::SeriesTooShort {
                length: self.len,
                minimum: 3,
            });
        }
        let dim = self.dim;
        let mut points = Vec::with_capacity((self.len - 2) * dim);
        for t in 1..self.len - 1 {
            for c in 0..dim {
                let prev = self.points[(t - 1) * dim + c];
                let cur = self.points[t * dim + c];
                let next = self.points[(t + 1) * dim + c];
                points.push(((cur - prev) + (next - prev) / 2.0) / 2.0);
            }
        }
        Ok(Self {
            len: self.len - 2,
            dim,
            points,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    fn with_origin(&self) -> Self {
        let mut points = vec![0.0; self.dim];
        points.extend_from_slice(&self.points);
        Self {
            len: self.len + 1,
            dim: self.dim,
            points,
        }
    }

    #[inline]
    fn point(&self, t: usize) -> &[f64] {
        &self.points[t * self.dim..(t + 1) * self.dim]
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

#[inline]
fn norm_dist(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        (a[0] - b[0]).abs()
    } else {
        sq_dist(a, b).sqrt()
    }
}

#[inline]
fn norm_to_scalar(a: &[f64], g: f64) -> f64 {
    if a.len() == 1 {
        (a[0] - g).abs()
    } else {
        a.iter().map(|v| (v - g) * (v - g)).sum::<f64>().sqrt()
    }
}

#[inline]
fn within(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
}

/// MSM cost of splitting/merging `new` next to `prev`, given the point `other` it is compared to.
#[inline]
fn msm_cost(new: &[f64], prev: &[f64], other: &[f64], c: f64) -> f64 {
    let between = if new.len() == 1 {
        let (x, p, o) = (new[0], prev[0], other[0]);
        (p <= x && x <= o) || (p >= x && x >= o)
    } else {
        let half_diameter = sq_dist(prev, other).sqrt() / 2.0;
        let to_mid = new
            .iter()
            .zip(prev.iter().zip(other))
            .map(|(x, (p, o))| {
                let d = x - (p + o) / 2.0;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        to_mid <= half_diameter
    };
    if between {
        c
    } else {
        c + norm_dist(new, prev).min(norm_dist(new, other))
    }
}

/// Band over 0-based cell indices: `|i*m - j*n| <= window * n * m`.
#[derive(Debug, Clone, Copy)]
struct Band {
    n: usize,
    m: usize,
    radius: f64,
}

impl Band {
    fn new(window: Option<f64>, n: usize, m: usize) -> Result<Option<Self>> {
        let Some(w) = window else { return Ok(None) };
        let longest = n.max(m) as f64;
        if w < (n as f64 - m as f64).abs() / longest {
            return Err(Error::InfeasibleBand { window: w, n, m });
        }
        Ok(Some(Self {
            n,
            m,
            radius: w * (n as f64) * (m as f64),
        }))
    }

    #[inline]
    fn contains(&self, i: usize, j: usize) -> bool {
        ((i * self.m) as f64 - (j * self.n) as f64).abs() <= self.radius
    }

    /// Inclusive column range of row `i`, or `None` when the row is empty.
    fn row(&self, i: usize) -> Option<(usize, usize)> {
        let centre = (i * self.m) as f64 / self.n as f64;
        let half = self.radius / self.n as f64;
        let mut lo = (centre - half).ceil().max(0.0) as usize;
        let mut hi = ((centre + half).floor().max(0.0) as usize).min(self.m - 1);
        // settle rounding at the edges with the exact predicate
        while lo > 0 && self.contains(i, lo - 1) {
            lo -= 1;
        }
        while lo <= hi && !self.contains(i, lo) {
            lo += 1;
        }
        while hi + 1 < self.m && self.contains(i, hi + 1) {
            hi += 1;
        }
        while hi >= lo && !self.contains(i, hi) {
            if hi == 0 {
                return None;
            }
            hi -= 1;
        }
        (lo <= hi).then_some((lo, hi))
    }
}

enum Recurrence {
    Dtw {
        weights: Option<Vec<f64>>,
    },
    Erp {
        g: f64,
    },
    Edr {
        eps: f64,
    },
    Lcss {
        eps: f64,
    },
    Msm {
        c: f64,
    },
    Twe {
        nu: f64,
        lambda: f64,
        xp: Prepared,
        yp: Prepared,
    },
}

struct Grid<'a> {
    x: &'a Prepared,
    y: &'a Prepared,
    band: Option<Band>,
    rec: Recurrence,
}

impl<'a> Grid<'a> {
    fn new(x: &'a Prepared, y: &'a Prepared, spec: &DistanceSpec) -> Result<Self> {
        if x.dim != y.dim {
            return Err(Error::ChannelMismatch {
                left: x.dim,
                right: y.dim,
            });
        }
        let (n, m) = (x.len, y.len);
        let rec = match spec.kind {
            DistanceKind::Dtw | DistanceKind::Ddtw => Recurrence::Dtw { weights: None },
            DistanceKind::Wdtw | DistanceKind::Wddtw => {
                let longest = n.max(m);
                let half = longest as f64 / 2.0;
                let weights = (0..longest)
                    .map(|k| 1.0 / (1.0 + (-spec.g * (k as f64 - half)).exp()))
                    .collect();
                Recurrence::Dtw { weights: Some(weights) }
            }
            DistanceKind::Erp => Recurrence::Erp { g: spec.erp_g },
            DistanceKind::Edr => Recurrence::Edr { eps: spec.epsilon },
            DistanceKind::Lcss => Recurrence::Lcss { eps: spec.epsilon },
            DistanceKind::Msm => Recurrence::Msm { c: spec.c },
            DistanceKind::Twe => Recurrence::Twe {
                nu: spec.nu,
                lambda: spec.lambda,
                xp: x.with_origin(),
                yp: y.with_origin(),
            },
            k => return Err(Error::UnsupportedKind(k.name())),
        };
        Ok(Self {
            x,
            y,
            band: Band::new(spec.window, n, m)?,
            rec,
        })
    }

    /// Boundary entry `D[0][j]` given `D[0][j-1]`.
    #[inline]
    fn top(&self, j: usize, left: f64) -> f64 {
        match self.rec {
            Recurrence::Erp { g } => left + norm_to_scalar(self.y.point(j - 1), g),
            Recurrence::Edr { .. } => j as f64,
            Recurrence::Lcss { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Boundary entry `D[i][0]` given `D[i-1][0]`.
    #[inline]
    fn side(&self, i: usize, up: f64) -> f64 {
        match self.rec {
            Recurrence::Erp { g } => up + norm_to_scalar(self.x.point(i - 1), g),
            Recurrence::Edr { .. } => i as f64,
            Recurrence::Lcss { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Interior entry `D[i][j]` for `i, j >= 1`.
    #[inline]
    fn cell(&self, i: usize, j: usize, diag: f64, up: f64, left: f64) -> f64 {
        let xi = self.x.point(i - 1);
        let yj = self.y.point(j - 1);
        match &self.rec {
            Recurrence::Dtw { weights } => {
                let cost = match weights {
                    None => sq_dist(xi, yj),
                    Some(w) => w[i.abs_diff(j)] * sq_dist(xi, yj),
                };
                cost + diag.min(up).min(left)
            }
            Recurrence::Erp { g } => (diag + norm_dist(xi, yj))
                .min(up + norm_to_scalar(xi, *g))
                .min(left + norm_to_scalar(yj, *g)),
            Recurrence::Edr { eps } => {
                let sub = if within(xi, yj, *eps) { 0.0 } else { 1.0 };
                (diag + sub).min(up + 1.0).min(left + 1.0)
            }
            Recurrence::Lcss { eps } => {
                let gain = if within(xi, yj, *eps) { 1.0 } else { 0.0 };
                (diag - gain).min(up).min(left)
            }
            Recurrence::Msm { c } => {
                let mv = diag + norm_dist(xi, yj);
                let split_x = if i >= 2 {
                    up + msm_cost(xi, self.x.point(i - 2), yj, *c)
                } else {
                    f64::INFINITY
                };
                let split_y = if j >= 2 {
                    left + msm_cost(yj, self.y.point(j - 2), xi, *c)
                } else {
                    f64::INFINITY
                };
                mv.min(split_x).min(split_y)
            }
            Recurrence::Twe { nu, lambda, xp, yp } => {
                // padded series carry the origin at index 0, so x_{i-1} sits at xp[i]
                let (xi, xi_prev) = (xp.point(i), xp.point(i - 1));
                let (yj, yj_prev) = (yp.point(j), yp.point(j - 1));
                let del_x = norm_dist(xi, xi_prev) + nu + lambda;
                let del_y = norm_dist(yj, yj_prev) + nu + lambda;
                let matched = norm_dist(xi, yj) + norm_dist(xi_prev, yj_prev) + 2.0 * nu * i.abs_diff(j) as f64;
                (diag + matched).min(up + del_x).min(left + del_y)
            }
        }
    }

    /// Maps a raw accumulated value to the reported distance scale.
    fn finish(&self, raw: f64) -> f64 {
        match self.rec {
            Recurrence::Edr { .. } => raw / self.x.len.max(self.y.len) as f64,
            Recurrence::Lcss { .. } => 1.0 + raw / self.x.len.min(self.y.len) as f64,
            _ => raw,
        }
    }

    fn full(&self) -> Vec<f64> {
        let (n, m) = (self.x.len, self.y.len);
        let w = m + 1;
        let mut d = vec![f64::INFINITY; (n + 1) * w];
        d[0] = 0.0;
        for j in 1..=m {
            d[j] = self.top(j, d[j - 1]);
        }
        for i in 1..=n {
            d[i * w] = self.side(i, d[(i - 1) * w]);
            if let Some((lo, hi)) = self.row_range(i) {
                for j in lo..=hi {
                    d[i * w + j] = self.cell(i, j, d[(i - 1) * w + j - 1], d[(i - 1) * w + j], d[i * w + j - 1]);
                }
            }
        }
        d
    }

    fn rolling(&self) -> f64 {
        let (n, m) = (self.x.len, self.y.len);
        let mut prev = vec![f64::INFINITY; m + 1];
        let mut cur = vec![f64::INFINITY; m + 1];
        prev[0] = 0.0;
        for j in 1..=m {
            prev[j] = self.top(j, prev[j - 1]);
        }
        for i in 1..=n {
            cur.fill(f64::INFINITY);
            cur[0] = self.side(i, prev[0]);
            if let Some((lo, hi)) = self.row_range(i) {
                for j in lo..=hi {
                    cur[j] = self.cell(i, j, prev[j - 1], prev[j], cur[j - 1]);
                }
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[m]
    }

    /// 1-based inclusive column range of DP row `i`.
    fn row_range(&self, i: usize) -> Option<(usize, usize)> {
        match self.band {
            None => Some((1, self.y.len)),
            Some(b) => b.row(i - 1).map(|(lo, hi)| (lo + 1, hi + 1)),
        }
    }

    fn check_feasible(&self, value: f64, spec: &DistanceSpec) -> Result<f64> {
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::InfeasibleBand {
                window: spec.window.unwrap_or(f64::INFINITY),
                n: self.x.len,
                m: self.y.len,
            })
        }
    }
}

pub(crate) fn distance_prepared(x: &Prepared, y: &Prepared, spec: &DistanceSpec) -> Result<f64> {
    let grid = Grid::new(x, y, spec)?;
    let raw = grid.check_feasible(grid.rolling(), spec)?;
    Ok(grid.finish(raw))
}

/// Accumulated-cost grid of an elastic distance, including the padded
/// boundary row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    m: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry `(i, j)` for `i in 0..=n`, `j in 0..=m`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * (self.m + 1) + j]
    }

    pub fn distance(&self) -> f64 {
        self.get(self.n, self.m)
    }
}

pub fn cost_matrix(x: SeriesView<'_>, y: SeriesView<'_>, spec: &DistanceSpec) -> Result<CostMatrix> {
    spec.validate()?;
    if spec.kind.is_lockstep() {
        return Err(Error::UnsupportedKind(spec.kind.name()));
    }
    let px = Prepared::new(x, spec)?;
    let py = Prepared::new(y, spec)?;
    let grid = Grid::new(&px, &py, spec)?;
    let entries: Vec<f64> = grid.full().into_iter().map(|v| grid.finish(v)).collect();
    let (n, m) = (px.len, py.len);
    grid.check_feasible(entries[n * (m + 1) + m], spec)?;
    Ok(CostMatrix { n, m, entries })
}

/// Warping path as 0-based index pairs. For derivative kinds the indices
/// refer to the derivative series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentPath {
    pub pairs: Vec<(usize, usize)>,
}

impl AlignmentPath {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub(crate) fn path_prepared(x: &Prepared, y: &Prepared, spec: &DistanceSpec) -> Result<(AlignmentPath, f64)> {
    if !spec.kind.is_dtw_family() {
        return Err(Error::UnsupportedKind(spec.kind.name()));
    }
    let grid = Grid::new(x, y, spec)?;
    let d = grid.full();
    let (n, m) = (x.len, y.len);
    let w = m + 1;
    let total = grid.check_feasible(d[n * w + m], spec)?;
    let mut pairs = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    loop {
        pairs.push((i - 1, j - 1));
        if i == 1 && j == 1 {
            break;
        }
        let diag = d[(i - 1) * w + j - 1];
        let up = d[(i - 1) * w + j];
        let left = d[i * w + j - 1];
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    Ok((AlignmentPath { pairs }, total))
}

/// Optimal warping path and its cost. Ties prefer the diagonal step, then
/// the step advancing `x`.
pub fn alignment_path(x: SeriesView<'_>, y: SeriesView<'_>, spec: &DistanceSpec) -> Result<(AlignmentPath, f64)> {
    spec.validate()?;
    if !spec.kind.is_dtw_family() {
        return Err(Error::UnsupportedKind(spec.kind.name()));
    }
    let px = Prepared::new(x, spec)?;
    let py = Prepared::new(y, spec)?;
    path_prepared(&px, &py, spec)
}

/// Weight applied to the pointwise cost at cell `(i, j)` under a DTW-family spec.
pub(crate) fn path_weight(spec: &DistanceSpec, n: usize, m: usize, i: usize, j: usize) -> f64 {
    match spec.kind {
        DistanceKind::Wdtw | DistanceKind::Wddtw => {
            let half = n.max(m) as f64 / 2.0;
            1.0 / (1.0 + (-spec.g * (i.abs_diff(j) as f64 - half)).exp())
        }
        _ => 1.0,
    }
}

impl Prepared {
    pub(crate) fn point_at(&self, t: usize) -> &[f64] {
        self.point(t)
    }
}
