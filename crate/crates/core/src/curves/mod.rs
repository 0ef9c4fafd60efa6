//! Polygonal curves and exact distance computations.
//!
//! All discrete distances are computed by dynamic programming over the
//! `m1 x m2` grid of vertex pairs. Fréchet combines costs with `max`, DTW
//! with `+`. The alignment-constrained variants restrict which traversals
//! are admissible:
//!
//! - *anchored* (width `w`, even): every paired `(i, j)` has `|i - j| <= w/2`;
//! - *speed* (`w >= 1`): every vertex is paired with at most `w` vertices of
//!   the other curve.
//!
//! Vertex indices are 0-based throughout the crate.

mod continuous;
mod traversal;

pub use continuous::{continuous_frechet_1d, frechet_1d_decision};
pub use traversal::{enumerate_traversals, Traversal, MAX_ENUMERATION_LEN};

use crate::error::{Error, Result};

/// A polygonal curve in `R^d`, stored as a flat coordinate buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    id: String,
    dim: usize,
    coords: Vec<f64>,
}

impl Curve {
    /// Builds a curve from a list of points; every point must have the same
    /// dimension and finite coordinates.
    pub fn new(id: impl Into<String>, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidCurve(format!("vertex {i} has {} coordinates, expected {dim}", p.len())));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(id, dim, coords)
    }

    /// Builds a curve from `m * dim` row-major coordinates.
    pub fn from_flat(id: impl Into<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCurve("dimension must be positive".into()));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCurve(format!(
                "need a positive multiple of {dim} coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite coordinate at vertex {}", bad / dim)));
        }
        Ok(Curve { id: id.into(), dim, coords })
    }

    /// One-dimensional curve (a time series).
    pub fn from_values(id: impl Into<String>, values: &[f64]) -> Result<Self> {
        Self::from_flat(id, 1, values.to_vec())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a curve has at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Which distance to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    Frechet,
    Dtw,
    /// Traversals with `|i - j| <= w/2`; `w` must be even and at least 2.
    AnchoredFrechet(usize),
    AnchoredDtw(usize),
    /// Traversals where no vertex has more than `w` partners.
    SpeedFrechet(usize),
    SpeedDtw(usize),
    ContinuousFrechet1d,
}

impl DistanceKind {
    pub fn validate(self) -> Result<()> {
        match self {
            DistanceKind::AnchoredFrechet(w) | DistanceKind::AnchoredDtw(w) => {
                if w < 2 || w % 2 != 0 {
                    return Err(Error::InvalidParameter(format!("anchored width must be even and >= 2, got {w}")));
                }
            }
            DistanceKind::SpeedFrechet(0) | DistanceKind::SpeedDtw(0) => {
                return Err(Error::InvalidParameter("speed must be >= 1".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether traversal costs are summed (DTW) rather than maximized.
    pub fn is_sum(self) -> bool {
        matches!(self, DistanceKind::Dtw | DistanceKind::AnchoredDtw(_) | DistanceKind::SpeedDtw(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Aggregate {
    Max,
    Sum,
}

impl Aggregate {
    #[inline]
    fn combine(self, acc: f64, cost: f64) -> f64 {
        match self {
            Aggregate::Max => acc.max(cost),
            Aggregate::Sum => acc + cost,
        }
    }
}

fn check_dims(p: &Curve, q: &Curve) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    Ok(())
}

/// Discrete Fréchet distance.
pub fn discrete_frechet(p: &Curve, q: &Curve) -> Result<f64> {
    check_dims(p, q)?;
    Ok(banded_dp(p, q, Aggregate::Max, None))
}

/// Dynamic time warping distance (sum of Euclidean pair costs).
pub fn dtw(p: &Curve, q: &Curve) -> Result<f64> {
    check_dims(p, q)?;
    Ok(banded_dp(p, q, Aggregate::Sum, None))
}

/// Computes any supported distance, including the alignment-constrained
/// ones. Returns [`Error::Infeasible`] when no admissible traversal exists.
pub fn constrained_distance(p: &Curve, q: &Curve, kind: DistanceKind) -> Result<f64> {
    check_dims(p, q)?;
    kind.validate()?;
    let (m1, m2) = (p.len(), q.len());
    match kind {
        DistanceKind::Frechet => Ok(banded_dp(p, q, Aggregate::Max, None)),
        DistanceKind::Dtw => Ok(banded_dp(p, q, Aggregate::Sum, None)),
        DistanceKind::AnchoredFrechet(w) | DistanceKind::AnchoredDtw(w) => {
            let half = w / 2;
            if m1.abs_diff(m2) > half {
                return Err(Error::Infeasible(format!("lengths {m1} and {m2} differ by more than w/2 = {half}")));
            }
            let agg = if kind.is_sum() { Aggregate::Sum } else { Aggregate::Max };
            Ok(banded_dp(p, q, agg, Some(half)))
        }
        DistanceKind::SpeedFrechet(w) | DistanceKind::SpeedDtw(w) => {
            if m1 > w * m2 || m2 > w * m1 {
                return Err(Error::Infeasible(format!("length ratio {m1}/{m2} outside [1/{w}, {w}]")));
            }
            let agg = if kind.is_sum() { Aggregate::Sum } else { Aggregate::Max };
            let d = speed_dp(p, q, agg, w);
            if d.is_finite() {
                Ok(d)
            } else {
                Err(Error::Infeasible(format!("no {w}-speed traversal")))
            }
        }
        DistanceKind::ContinuousFrechet1d => continuous_frechet_1d(p, q),
    }
}

/// Min-over-predecessors DP, optionally restricted to `|i - j| <= band`.
/// Cells outside the band hold `+inf`.
fn banded_dp(p: &Curve, q: &Curve, agg: Aggregate, band: Option<usize>) -> f64 {
    let (m1, m2) = (p.len(), q.len());
    let inside = |i: usize, j: usize| band.is_none_or(|b| i.abs_diff(j) <= b);
    let mut prev = vec![f64::INFINITY; m2];
    let mut cur = vec![f64::INFINITY; m2];
    for i in 0..m1 {
        let pi = p.point(i);
        for j in 0..m2 {
            if !inside(i, j) {
                cur[j] = f64::INFINITY;
                continue;
            }
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let mut b = f64::INFINITY;
                if i > 0 {
                    b = b.min(prev[j]);
                }
                if j > 0 {
                    b = b.min(cur[j - 1]);
                }
                if i > 0 && j > 0 {
                    b = b.min(prev[j - 1]);
                }
                b
            };
            cur[j] = if best.is_finite() { agg.combine(best, euclidean(pi, q.point(j))) } else { f64::INFINITY };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m2 - 1]
}

/// Speed-constrained DP. Each cell carries one value per run state:
/// state 0 means the last step was diagonal (or the start), states
/// `1..w` an ongoing run of `s` steps advancing only `j`, and states
/// `w..2w-1` a run of `s - w + 1` steps advancing only `i`. A run of `k`
/// steps gives the fixed vertex `k + 1` partners, so runs are capped at
/// `w - 1`.
fn speed_dp(p: &Curve, q: &Curve, agg: Aggregate, w: usize) -> f64 {
    let (m1, m2) = (p.len(), q.len());
    let cap = w - 1;
    let states = 1 + 2 * cap;
    let h_state = |run: usize| run;
    let v_state = |run: usize| cap + run;
    let idx = |i: usize, j: usize, s: usize| (i * m2 + j) * states + s;
    let mut table = vec![f64::INFINITY; m1 * m2 * states];

    for i in 0..m1 {
        for j in 0..m2 {
            let cost = euclidean(p.point(i), q.point(j));
            if i == 0 && j == 0 {
                table[idx(0, 0, 0)] = cost;
                continue;
            }
            // Diagonal step resets every run.
            if i > 0 && j > 0 {
                let best = (0..states).map(|s| table[idx(i - 1, j - 1, s)]).fold(f64::INFINITY, f64::min);
                if best.is_finite() {
                    table[idx(i, j, 0)] = agg.combine(best, cost);
                }
            }
            if cap == 0 {
                continue;
            }
            // Step advancing j only: extends a j-run or starts one.
            if j > 0 {
                for s in 0..states {
                    let from = table[idx(i, j - 1, s)];
                    if !from.is_finite() {
                        continue;
                    }
                    let run = if (1..=cap).contains(&s) { s + 1 } else { 1 };
                    if run > cap {
                        continue;
                    }
                    let t = idx(i, j, h_state(run));
                    table[t] = table[t].min(agg.combine(from, cost));
                }
            }
            // Step advancing i only.
            if i > 0 {
                for s in 0..states {
                    let from = table[idx(i - 1, j, s)];
                    if !from.is_finite() {
                        continue;
                    }
                    let run = if s > cap { s - cap + 1 } else { 1 };
                    if run > cap {
                        continue;
                    }
                    let t = idx(i, j, v_state(run));
                    table[t] = table[t].min(agg.combine(from, cost));
                }
            }
        }
    }
    (0..states).map(|s| table[idx(m1 - 1, m2 - 1, s)]).fold(f64::INFINITY, f64::min)
}
