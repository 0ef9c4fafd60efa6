//! Hashing for anchored and speed-constrained distances.
//!
//! Both schemes cut a curve into disjoint blocks using private integer
//! noise, snap block `i` with the shared shift `t_i`, and keep the per-block
//! keys in an array. Array equality needs the same number of blocks and
//! equal keys position by position, which is what ties the collision to an
//! alignment constraint.

use rand::Rng;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::grid::{check_count, check_positive, snap_dedup_into, GridShift, LatticeKey, Metric, Scheme, SchemeParams};
use crate::partition::{check_shifts, shifts_tag, PartitionKind, PartitionSpec};

/// Hash value of the constrained schemes: one key per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrayKey {
    scheme_id: u64,
    blocks: Vec<LatticeKey>,
}

impl ArrayKey {
    pub fn new(scheme_id: u64, blocks: Vec<LatticeKey>) -> Self {
        ArrayKey { scheme_id, blocks }
    }

    pub fn scheme_id(&self) -> u64 {
        self.scheme_id
    }

    pub fn blocks(&self) -> &[LatticeKey] {
        &self.blocks
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// Draws in `[1, width / 2]`.
    Anchored { width: usize },
    /// Draws in `[1, width * ell]`.
    Speed { width: usize, ell: usize },
}

impl NoiseKind {
    fn max(self) -> usize {
        match self {
            NoiseKind::Anchored { width } => width / 2,
            NoiseKind::Speed { width, ell } => width * ell,
        }
    }
}

/// Private per-curve randomness of the constrained schemes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutNoise {
    kind: NoiseKind,
    values: Vec<usize>,
}

impl CutNoise {
    pub fn new(kind: NoiseKind, values: Vec<usize>) -> Result<Self> {
        if let NoiseKind::Anchored { width } = kind {
            check_width(width)?;
        }
        let max = kind.max();
        if max == 0 {
            return Err(Error::InvalidParameter("noise range is empty".into()));
        }
        if let Some(v) = values.iter().find(|&&v| v < 1 || v > max) {
            return Err(Error::InvalidParameter(format!("noise value {v} outside [1, {max}]")));
        }
        Ok(CutNoise { kind, values })
    }

    /// `count` i.i.d. draws uniform in `[1, width / 2]`.
    pub fn sample_anchored<R: Rng + ?Sized>(width: usize, count: usize, rng: &mut R) -> Self {
        Self::sample(NoiseKind::Anchored { width }, count, rng)
    }

    /// `count` i.i.d. draws uniform in `[1, width * ell]`.
    pub fn sample_speed<R: Rng + ?Sized>(width: usize, ell: usize, count: usize, rng: &mut R) -> Self {
        Self::sample(NoiseKind::Speed { width, ell }, count, rng)
    }

    fn sample<R: Rng + ?Sized>(kind: NoiseKind, count: usize, rng: &mut R) -> Self {
        let max = kind.max();
        assert!(max >= 1, "noise range is empty");
        CutNoise { kind, values: (0..count).map(|_| rng.random_range(1..=max)).collect() }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

fn check_width(width: usize) -> Result<()> {
    if width >= 2 && width.is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("anchored width must be even and >= 2, got {width}")))
    }
}

/// Number of noise draws [`anchored_partition`] consumes.
pub fn anchored_noise_len(m: usize, ell: usize) -> usize {
    m.div_ceil(ell).saturating_sub(1)
}

/// Fixed cuts at `i * ell`, each pushed right by its noise value and capped
/// at `m`; a cut not beyond the previous surviving cut, or equal to `m`, is
/// dropped.
pub fn anchored_partition(m: usize, width: usize, ell: usize, noise: &CutNoise) -> Result<PartitionSpec> {
    check_count("m", m)?;
    check_width(width)?;
    check_count("ell", ell)?;
    match noise.kind {
        NoiseKind::Anchored { width: w } if w == width => {}
        _ => return Err(Error::InvalidParameter("noise was not drawn for this anchored width".into())),
    }
    let needed = anchored_noise_len(m, ell);
    if noise.values.len() < needed {
        return Err(Error::LengthMismatch { expected: needed, actual: noise.values.len() });
    }
    let mut cuts: Vec<usize> = Vec::with_capacity(needed);
    for (i, &r) in (1..=needed).zip(&noise.values) {
        let s = (i * ell + r).min(m);
        if s < m && cuts.last().is_none_or(|&prev| s > prev) {
            cuts.push(s);
        }
    }
    PartitionSpec::new(m, cuts, PartitionKind::Anchored)
}

/// Consecutive blocks whose lengths are the noise draws in order; the last
/// block is truncated at `m`.
pub fn speed_partition(m: usize, width: usize, ell: usize, noise: &CutNoise) -> Result<PartitionSpec> {
    check_count("m", m)?;
    check_count("w", width)?;
    check_count("ell", ell)?;
    if noise.kind != (NoiseKind::Speed { width, ell }) {
        return Err(Error::InvalidParameter("noise was not drawn for this speed scheme".into()));
    }
    let mut cuts = Vec::new();
    let mut end = 0;
    for &r in &noise.values {
        end += r;
        if end >= m {
            return PartitionSpec::new(m, cuts, PartitionKind::Speed);
        }
        cuts.push(end);
    }
    Err(Error::InvalidParameter(format!("{} noise draws cover only {end} of {m} vertices", noise.values.len())))
}

/// Array of per-block basic hashes; block `i` uses `shifts[i]`.
///
/// `shifts` is the sequence shared by inputs and queries and must be at
/// least as long as the number of blocks; only the used prefix enters the
/// key's scheme id.
pub fn constrained_hash(p: &Curve, params: &SchemeParams, shifts: &[GridShift], noise: &CutNoise) -> Result<ArrayKey> {
    let part = match params.scheme {
        Scheme::Anchored { width, ell } => anchored_partition(p.len(), width, ell, noise)?,
        Scheme::Speed { width, ell } => speed_partition(p.len(), width, ell, noise)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "constrained_hash needs anchored or speed params, got {}",
                other.name()
            )))
        }
    };
    if shifts.len() < part.num_blocks() {
        return Err(Error::LengthMismatch { expected: part.num_blocks(), actual: shifts.len() });
    }
    check_shifts(p.dim(), params.delta, shifts)?;
    let (width, ell) = match params.scheme {
        Scheme::Anchored { width, ell } | Scheme::Speed { width, ell } => (width, ell),
        _ => unreachable!(),
    };
    let shifts = &shifts[..part.num_blocks()];
    let scheme_id = shifts_tag(params.scheme.code(), &[width as u64, ell as u64], shifts);
    let dim = p.dim();
    let blocks = part
        .blocks()
        .into_iter()
        .zip(shifts)
        .map(|(range, shift)| {
            let mut cells = Vec::with_capacity((range.end() - range.start() + 1) * dim);
            let coords = &p.coords()[range.start() * dim..(range.end() + 1) * dim];
            snap_dedup_into(coords, dim, shift.delta(), shift.offset(), &mut cells);
            LatticeKey::from_parts(scheme_id, dim, cells)
        })
        .collect();
    Ok(ArrayKey { scheme_id, blocks })
}

fn constrained_plan(scheme: Scheme, r: f64, dim: usize, ell: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    check_count("ell", ell)?;
    let d = dim as f64;
    Ok(SchemeParams {
        scheme,
        metric: Metric::Frechet,
        r,
        c: 4.0 * d.powf(1.5) * ell as f64,
        delta: 4.0 * d * r * ell as f64,
        dim,
        max_len: 0,
    })
}

/// Anchored Fréchet scheme: `delta = 4 d r ell`, `c = 4 d^1.5 ell`.
pub fn plan_anchored(r: f64, dim: usize, width: usize, ell: usize) -> Result<SchemeParams> {
    check_width(width)?;
    constrained_plan(Scheme::Anchored { width, ell }, r, dim, ell)
}

/// Speed Fréchet scheme: `delta = 4 d r ell`, `c = 4 d^1.5 ell`.
pub fn plan_speed(r: f64, dim: usize, width: usize, ell: usize) -> Result<SchemeParams> {
    check_count("w", width)?;
    constrained_plan(Scheme::Speed { width, ell }, r, dim, ell)
}

fn constrained_dtw_plan(scheme: Scheme, r: f64, dim: usize, m1: usize, m2: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    check_count("m1", m1)?;
    check_count("m2", m2)?;
    let d = dim as f64;
    Ok(SchemeParams {
        scheme,
        metric: Metric::Dtw,
        r,
        c: 4.0 * d.powf(1.5) * (m1 + m2) as f64,
        delta: 2.0 * d * r,
        dim,
        max_len: m1.max(m2),
    })
}

/// Anchored DTW scheme: `delta = 2 d r`, `c = 4 d^1.5 (m1 + m2)`.
pub fn plan_anchored_dtw(r: f64, dim: usize, width: usize, ell: usize, m1: usize, m2: usize) -> Result<SchemeParams> {
    check_width(width)?;
    check_count("ell", ell)?;
    constrained_dtw_plan(Scheme::Anchored { width, ell }, r, dim, m1, m2)
}

/// Speed DTW scheme, planned like the anchored one.
pub fn plan_speed_dtw(r: f64, dim: usize, width: usize, ell: usize, m1: usize, m2: usize) -> Result<SchemeParams> {
    check_count("w", width)?;
    check_count("ell", ell)?;
    constrained_dtw_plan(Scheme::Speed { width, ell }, r, dim, m1, m2)
}
