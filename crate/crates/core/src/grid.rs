//! Randomly shifted grid hashing.
//!
//! A curve is hashed by snapping every vertex to the nearest point of a
//! grid of side `delta` and dropping consecutive duplicates. The *basic*
//! scheme draws one shift `t` uniformly from `[0, delta)^d` and uses the
//! same function for inputs and queries. The *constant* scheme instead
//! perturbs every vertex independently by a vector from
//! `[-delta/2, delta/2)^d` and snaps to the unshifted grid; inputs and
//! queries draw their perturbations independently.
//!
//! Keys hold integer cell indices, never coordinates, so key equality is
//! exact.

use rand::Rng;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::mix::WordHasher;

/// Distance a scheme is tuned for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Frechet,
    Dtw,
}

/// The hash family and its structural parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One random shift for the whole curve.
    Basic,
    /// Independent per-vertex perturbations, unshifted grid.
    Constant,
    /// Random partition into `blocks` overlapping pieces, one shift each.
    Tradeoff { blocks: usize },
    /// Noisy fixed-length partition for `width`-anchored distances.
    Anchored { width: usize, ell: usize },
    /// Random-length partition for `width`-speed distances.
    Speed { width: usize, ell: usize },
    /// Basic snapping plus removal of non-extremal vertices (1D only).
    Continuous1d,
}

impl Scheme {
    pub(crate) fn code(self) -> u64 {
        match self {
            Scheme::Basic => 1,
            Scheme::Constant => 2,
            Scheme::Tradeoff { .. } => 3,
            Scheme::Anchored { .. } => 4,
            Scheme::Speed { .. } => 5,
            Scheme::Continuous1d => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Basic => "basic",
            Scheme::Constant => "constant",
            Scheme::Tradeoff { .. } => "tradeoff",
            Scheme::Anchored { .. } => "anchored",
            Scheme::Speed { .. } => "speed",
            Scheme::Continuous1d => "continuous1d",
        }
    }

    /// Whether input and query curves use different hash functions.
    pub fn is_asymmetric(self) -> bool {
        matches!(self, Scheme::Constant | Scheme::Tradeoff { .. } | Scheme::Anchored { .. } | Scheme::Speed { .. })
    }
}

/// A fully planned hash family: grid resolution and approximation factor
/// bound to a query radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub scheme: Scheme,
    pub metric: Metric,
    /// Query radius.
    pub r: f64,
    /// Approximation factor: pairs farther than `c * r` never collide.
    pub c: f64,
    /// Grid side length.
    pub delta: f64,
    pub dim: usize,
    /// Curve-length bound the plan was made for (`m`, `M` or `m1 + m2`
    /// depending on the scheme). Zero when the plan does not depend on it.
    pub max_len: usize,
}

impl SchemeParams {
    /// Records the curve-length bound, needed by schemes whose near-pair
    /// collision probability depends on it.
    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    /// Distance `c * r` beyond which the scheme guarantees no collisions.
    pub fn far_radius(&self) -> f64 {
        self.c * self.r
    }
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

pub(crate) fn check_count(name: &str, x: usize) -> Result<()> {
    if x >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be >= 1")))
    }
}

/// Basic scheme for discrete Fréchet: `delta = 4 d m r`, `c = 4 d^1.5 m`.
pub fn plan_basic(r: f64, dim: usize, m: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    check_count("m", m)?;
    let d = dim as f64;
    Ok(SchemeParams {
        scheme: Scheme::Basic,
        metric: Metric::Frechet,
        r,
        c: 4.0 * d.powf(1.5) * m as f64,
        delta: 4.0 * d * m as f64 * r,
        dim,
        max_len: m,
    })
}

/// Constant-factor scheme: `delta = 4 d r`, `c = 4 d^1.5`.
pub fn plan_constant(r: f64, dim: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    let d = dim as f64;
    Ok(SchemeParams {
        scheme: Scheme::Constant,
        metric: Metric::Frechet,
        r,
        c: 4.0 * d.powf(1.5),
        delta: 4.0 * d * r,
        dim,
        max_len: 0,
    })
}

/// Basic scheme for DTW: `delta = 2 d r`, `c = 4 d^1.5 M`.
pub fn plan_basic_dtw(r: f64, dim: usize, max_len: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    check_count("M", max_len)?;
    let d = dim as f64;
    Ok(SchemeParams {
        scheme: Scheme::Basic,
        metric: Metric::Dtw,
        r,
        c: 4.0 * d.powf(1.5) * max_len as f64,
        delta: 2.0 * d * r,
        dim,
        max_len,
    })
}

/// Grid offset `t`, each coordinate in `[0, delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridShift {
    delta: f64,
    offset: Vec<f64>,
}

impl GridShift {
    pub fn new(delta: f64, offset: Vec<f64>) -> Result<Self> {
        check_positive("delta", delta)?;
        check_count("dimension", offset.len())?;
        if let Some(t) = offset.iter().find(|t| !(0.0..delta).contains(*t)) {
            return Err(Error::InvalidParameter(format!("shift coordinate {t} outside [0, {delta})")));
        }
        Ok(GridShift { delta, offset })
    }

    /// The canonical, unshifted grid.
    pub fn zero(delta: f64, dim: usize) -> Result<Self> {
        Self::new(delta, vec![0.0; dim])
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    /// Coordinate of grid line `cell` along axis `axis`.
    pub fn cell_coordinate(&self, axis: usize, cell: i64) -> f64 {
        cell as f64 * self.delta + self.offset[axis]
    }

    pub(crate) fn hash_into(&self, h: &mut WordHasher) {
        h.write_f64(self.delta);
        for &t in &self.offset {
            h.write_f64(t);
        }
    }
}

/// Per-vertex perturbations for the constant scheme, row-major `m x d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSeq {
    delta: f64,
    dim: usize,
    offsets: Vec<f64>,
}

impl PerturbationSeq {
    pub fn new(delta: f64, dim: usize, offsets: Vec<f64>) -> Result<Self> {
        check_positive("delta", delta)?;
        check_count("dimension", dim)?;
        if !offsets.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!("{} offsets is not a multiple of d = {dim}", offsets.len())));
        }
        let half = delta / 2.0;
        if let Some(t) = offsets.iter().find(|t| !(-half..half).contains(*t)) {
            return Err(Error::InvalidParameter(format!("perturbation {t} outside [-{half}, {half})")));
        }
        Ok(PerturbationSeq { delta, dim, offsets })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vertices covered.
    pub fn len(&self) -> usize {
        self.offsets.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn offset(&self, i: usize) -> &[f64] {
        &self.offsets[i * self.dim..(i + 1) * self.dim]
    }
}

/// Hash value: a sequence of lattice vectors with no two consecutive ones
/// equal, tagged with the scheme instance that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeKey {
    scheme_id: u64,
    dim: usize,
    cells: Vec<i64>,
}

impl LatticeKey {
    pub(crate) fn from_parts(scheme_id: u64, dim: usize, cells: Vec<i64>) -> Self {
        debug_assert!(cells.len().is_multiple_of(dim));
        LatticeKey { scheme_id, dim, cells }
    }

    pub fn scheme_id(&self) -> u64 {
        self.scheme_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of lattice vectors.
    pub fn len(&self) -> usize {
        self.cells.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Flat cell indices, row-major.
    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn vertex(&self, i: usize) -> &[i64] {
        &self.cells[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.cells.chunks_exact(self.dim)
    }
}

/// Index of the grid line nearest to `x`; ties round up.
#[inline]
pub(crate) fn snap_coordinate(x: f64, delta: f64, offset: f64) -> i64 {
    ((x - offset) / delta + 0.5).floor() as i64
}

/// Snaps row-major `coords` onto the grid `delta * Z^d + offset` and
/// appends the cells to `out`, skipping consecutive duplicates within this
/// call.
pub(crate) fn snap_dedup_into(coords: &[f64], dim: usize, delta: f64, offset: &[f64], out: &mut Vec<i64>) {
    let start = out.len();
    for point in coords.chunks_exact(dim) {
        let at = out.len();
        out.extend(point.iter().zip(offset).map(|(&x, &t)| snap_coordinate(x, delta, t)));
        if at > start && out[at - dim..at] == out[at..] {
            out.truncate(at);
        }
    }
}

pub(crate) fn shift_tag(code: u64, shift: &GridShift) -> u64 {
    let mut h = WordHasher::new(code);
    shift.hash_into(&mut h);
    h.finish()
}

/// Snaps every vertex to the nearest point of the shifted grid and removes
/// consecutive duplicates.
pub fn snap_to_grid(p: &Curve, shift: &GridShift) -> Result<LatticeKey> {
    if shift.dim() != p.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: shift.dim() });
    }
    let mut cells = Vec::with_capacity(p.coords().len());
    snap_dedup_into(p.coords(), p.dim(), shift.delta, &shift.offset, &mut cells);
    Ok(LatticeKey::from_parts(shift_tag(Scheme::Basic.code(), shift), p.dim(), cells))
}

/// The basic scheme's hash. Identical to [`snap_to_grid`]; the key's
/// scheme id binds `delta` and the shift.
pub fn basic_hash(p: &Curve, params: &SchemeParams, shift: &GridShift) -> Result<LatticeKey> {
    if params.scheme != Scheme::Basic {
        return Err(Error::InvalidParameter(format!("basic_hash needs basic params, got {}", params.scheme.name())));
    }
    if shift.delta != params.delta {
        return Err(Error::InvalidParameter("shift resolution differs from params".into()));
    }
    snap_to_grid(p, shift)
}

/// The constant scheme's hash: perturb every vertex, snap to the
/// unshifted grid, remove consecutive duplicates.
pub fn constant_hash(p: &Curve, params: &SchemeParams, pert: &PerturbationSeq) -> Result<LatticeKey> {
    if params.scheme != Scheme::Constant {
        return Err(Error::InvalidParameter(format!(
            "constant_hash needs constant params, got {}",
            params.scheme.name()
        )));
    }
    if pert.delta != params.delta {
        return Err(Error::InvalidParameter("perturbation resolution differs from params".into()));
    }
    perturbed_snap(p, pert)
}

pub(crate) fn perturbed_snap(p: &Curve, pert: &PerturbationSeq) -> Result<LatticeKey> {
    if pert.dim != p.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: pert.dim });
    }
    if pert.len() != p.len() {
        return Err(Error::LengthMismatch { expected: p.len(), actual: pert.len() });
    }
    let dim = p.dim();
    let mut cells: Vec<i64> = Vec::with_capacity(p.coords().len());
    for (point, offset) in p.points().zip(pert.offsets.chunks_exact(dim)) {
        let at = cells.len();
        cells.extend(point.iter().zip(offset).map(|(&x, &t)| snap_coordinate(x + t, pert.delta, 0.0)));
        if at > 0 && cells[at - dim..at] == cells[at..] {
            cells.truncate(at);
        }
    }
    let mut h = WordHasher::new(Scheme::Constant.code());
    h.write_f64(pert.delta);
    Ok(LatticeKey::from_parts(h.finish(), dim, cells))
}

/// Uniform shift in `[0, delta)^d`.
pub fn sample_shift<R: Rng + ?Sized>(delta: f64, dim: usize, rng: &mut R) -> GridShift {
    assert!(delta > 0.0, "delta must be positive");
    GridShift { delta, offset: (0..dim).map(|_| rng.random_range(0.0..delta)).collect() }
}

/// `m` independent perturbations, uniform in `[-delta/2, delta/2)^d`.
pub fn sample_perturbation<R: Rng + ?Sized>(delta: f64, m: usize, dim: usize, rng: &mut R) -> PerturbationSeq {
    assert!(delta > 0.0, "delta must be positive");
    let half = delta / 2.0;
    PerturbationSeq { delta, dim, offsets: (0..m * dim).map(|_| rng.random_range(-half..half)).collect() }
}
