//! Partitioned hashing: the trade-off scheme.
//!
//! An input curve is cut into `K` overlapping blocks at a uniformly random
//! multiset of cut points; a query curve is cut deterministically into `K`
//! blocks of equal size. Each block is snapped to its own shifted grid and
//! the per-block keys are concatenated into one flat key.
//!
//! Indices in [`PartitionSpec::cuts`] are 1-based vertex positions, while
//! [`PartitionSpec::blocks`] returns 0-based inclusive ranges ready for
//! slicing.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::grid::{check_count, check_positive, snap_dedup_into, GridShift, LatticeKey, Metric, Scheme, SchemeParams};
use crate::mix::WordHasher;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    /// Overlapping blocks from a random cut multiset (input side).
    SampledInput,
    /// Overlapping blocks of equal size (query side).
    DeterministicQuery,
    /// Disjoint blocks from perturbed fixed-length cuts.
    Anchored,
    /// Disjoint blocks with random lengths.
    Speed,
}

impl PartitionKind {
    pub fn is_overlapping(self) -> bool {
        matches!(self, PartitionKind::SampledInput | PartitionKind::DeterministicQuery)
    }
}

/// A partition of the vertex sequence `1..=len` into consecutive blocks.
///
/// For overlapping kinds block `i` spans `s_{i-1}..=s_i` with `s_0 = 1` and
/// `s_K = len`, so neighbours share a vertex and repeated cuts produce
/// single-vertex blocks. For disjoint kinds block `i` spans
/// `s_{i-1}+1..=s_i` with `s_0 = 0` and `s_K = len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionSpec {
    len: usize,
    cuts: Vec<usize>,
    kind: PartitionKind,
}

impl PartitionSpec {
    pub fn new(len: usize, cuts: Vec<usize>, kind: PartitionKind) -> Result<Self> {
        check_count("curve length", len)?;
        let bad = || Error::InvalidParameter(format!("invalid cuts {cuts:?} for length {len}"));
        if kind.is_overlapping() {
            if cuts.iter().any(|&s| s < 1 || s > len) || cuts.windows(2).any(|w| w[0] > w[1]) {
                return Err(bad());
            }
        } else if cuts.iter().any(|&s| s < 1 || s >= len) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad());
        }
        Ok(PartitionSpec { len, cuts, kind })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn num_blocks(&self) -> usize {
        self.cuts.len() + 1
    }

    /// 0-based inclusive vertex ranges of the blocks, in order.
    pub fn blocks(&self) -> Vec<RangeInclusive<usize>> {
        let k = self.num_blocks();
        let bound = |i: usize, first: usize| {
            if i == 0 {
                first
            } else if i == k {
                self.len
            } else {
                self.cuts[i - 1]
            }
        };
        if self.kind.is_overlapping() {
            (1..=k).map(|i| bound(i - 1, 1) - 1..=bound(i, 1) - 1).collect()
        } else {
            (1..=k).map(|i| bound(i - 1, 0)..=bound(i, 0) - 1).collect()
        }
    }
}

/// Samples a cut multiset uniformly among all non-decreasing sequences in
/// `[1..m]^{K-1}`.
///
/// Multisets of size `K-1` over `m` values correspond one-to-one to
/// `(K-1)`-subsets of `m + K - 2` values via `s_i = x_i - (i - 1)`.
pub fn sample_partition<R: Rng + ?Sized>(m: usize, blocks: usize, rng: &mut R) -> PartitionSpec {
    assert!(m >= 1 && blocks >= 1, "m and K must be positive");
    let mut xs = rand::seq::index::sample(rng, m + blocks - 2, blocks - 1).into_vec();
    xs.sort_unstable();
    let cuts = xs.iter().enumerate().map(|(i, &x)| x + 1 - i).collect();
    PartitionSpec { len: m, cuts, kind: PartitionKind::SampledInput }
}

/// Deterministic query partition: blocks of `b = ceil((m-1)/K) + 1`
/// vertices with stride `b - 1`; the last block may be shorter.
pub fn query_partition(m: usize, blocks: usize) -> PartitionSpec {
    assert!(m >= 1 && blocks >= 1, "m and K must be positive");
    let b = (m - 1).div_ceil(blocks) + 1;
    let cuts = (1..blocks).map(|i| (1 + i * (b - 1)).min(m)).collect();
    PartitionSpec { len: m, cuts, kind: PartitionKind::DeterministicQuery }
}

/// Trade-off scheme: `delta = 4 d r ceil(M/K)`, `c = 4 d^1.5 ceil(M/K)`.
pub fn plan_tradeoff(r: f64, dim: usize, max_len: usize, blocks: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("d", dim)?;
    check_count("M", max_len)?;
    check_count("K", blocks)?;
    let d = dim as f64;
    let per_block = max_len.div_ceil(blocks) as f64;
    Ok(SchemeParams {
        scheme: Scheme::Tradeoff { blocks },
        metric: Metric::Frechet,
        r,
        c: 4.0 * d.powf(1.5) * per_block,
        delta: 4.0 * d * r * per_block,
        dim,
        max_len,
    })
}

pub(crate) fn shifts_tag(code: u64, extra: &[u64], shifts: &[GridShift]) -> u64 {
    let mut h = WordHasher::new(code);
    for &x in extra {
        h.write(x);
    }
    for s in shifts {
        s.hash_into(&mut h);
    }
    h.finish()
}

pub(crate) fn check_shifts(dim: usize, delta: f64, shifts: &[GridShift]) -> Result<()> {
    for s in shifts {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: s.dim() });
        }
        if s.delta() != delta {
            return Err(Error::InvalidParameter("shift resolution differs from params".into()));
        }
    }
    Ok(())
}

/// Concatenation of the basic hashes of the blocks, block `i` snapped with
/// `shifts[i]`. Duplicates are removed within blocks only.
pub fn tradeoff_hash(
    p: &Curve,
    params: &SchemeParams,
    shifts: &[GridShift],
    part: &PartitionSpec,
) -> Result<LatticeKey> {
    let Scheme::Tradeoff { blocks } = params.scheme else {
        return Err(Error::InvalidParameter(format!(
            "tradeoff_hash needs tradeoff params, got {}",
            params.scheme.name()
        )));
    };
    if !part.kind.is_overlapping() {
        return Err(Error::InvalidParameter("tradeoff_hash needs an overlapping partition".into()));
    }
    if part.len != p.len() {
        return Err(Error::LengthMismatch { expected: p.len(), actual: part.len });
    }
    if part.num_blocks() != blocks || shifts.len() != blocks {
        return Err(Error::InvalidParameter(format!(
            "expected {blocks} blocks and shifts, got {} and {}",
            part.num_blocks(),
            shifts.len()
        )));
    }
    check_shifts(p.dim(), params.delta, shifts)?;
    let dim = p.dim();
    let mut cells = Vec::with_capacity(p.coords().len() + blocks * dim);
    for (range, shift) in part.blocks().into_iter().zip(shifts) {
        let coords = &p.coords()[range.start() * dim..(range.end() + 1) * dim];
        snap_dedup_into(coords, dim, shift.delta(), shift.offset(), &mut cells);
    }
    let tag = shifts_tag(Scheme::Tradeoff { blocks }.code(), &[blocks as u64], shifts);
    Ok(LatticeKey::from_parts(tag, dim, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{plan_basic, snap_to_grid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, HashSet};

    fn blocks(spec: &PartitionSpec) -> Vec<(usize, usize)> {
        spec.blocks().into_iter().map(|r| (r.start() + 1, r.end() + 1)).collect()
    }

    #[test]
    fn overlapping_blocks_share_endpoints() {
        let spec = PartitionSpec::new(4, vec![2], PartitionKind::SampledInput).unwrap();
        assert_eq!(blocks(&spec), vec![(1, 2), (2, 4)]);
        let spec = PartitionSpec::new(4, vec![2, 2, 4], PartitionKind::SampledInput).unwrap();
        assert_eq!(blocks(&spec), vec![(1, 2), (2, 2), (2, 4), (4, 4)]);
        assert!(PartitionSpec::new(4, vec![3, 2], PartitionKind::SampledInput).is_err());
        assert!(PartitionSpec::new(4, vec![5], PartitionKind::SampledInput).is_err());
    }

    #[test]
    fn query_partition_examples() {
        assert_eq!(blocks(&query_partition(5, 2)), vec![(1, 3), (3, 5)]);
        assert_eq!(blocks(&query_partition(4, 2)), vec![(1, 3), (3, 4)]);
        assert_eq!(blocks(&query_partition(3, 1)), vec![(1, 3)]);
        assert_eq!(query_partition(1, 3).num_blocks(), 3);
        assert_eq!(query_partition(7, 3).num_blocks(), 3);
    }

    #[test]
    fn single_block_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = sample_partition(5, 1, &mut rng);
        assert!(spec.cuts().is_empty());
        assert_eq!(blocks(&spec), vec![(1, 5)]);
    }

    #[test]
    fn sampled_multisets_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(sample_partition(3, 3, &mut rng).cuts().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (cuts, c) in counts {
            let f = c as f64 / n as f64;
            assert!((f - 1.0 / 6.0).abs() <= 0.02 / 6.0, "{cuts:?}: {f}");
            assert!(cuts.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn all_multisets(m: usize, len: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for s in min..=m {
            cur.push(s);
            all_multisets(m, len, s, cur, out);
            cur.pop();
        }
    }

    #[test]
    fn partition_family_is_bounded_by_binomial() {
        for m in 1..=6 {
            for k in 1..=4 {
                let mut all = Vec::new();
                all_multisets(m, k - 1, 1, &mut Vec::new(), &mut all);
                let distinct: HashSet<_> = all
                    .into_iter()
                    .map(|c| blocks(&PartitionSpec::new(m, c, PartitionKind::SampledInput).unwrap()))
                    .collect();
                assert!(distinct.len() <= binom(m + k - 1, k - 1), "m={m} K={k}");
            }
        }
    }

    #[test]
    fn planner_examples() {
        let p = plan_tradeoff(1.0, 1, 6, 2).unwrap();
        assert_eq!((p.delta, p.c), (12.0, 12.0));
        let p = plan_tradeoff(1.0, 1, 6, 6).unwrap();
        assert_eq!((p.delta, p.c), (4.0, 4.0));
        let p = plan_tradeoff(1.0, 1, 6, 1).unwrap();
        let b = plan_basic(1.0, 1, 6).unwrap();
        assert_eq!((p.delta, p.c), (24.0, 24.0));
        assert_eq!((p.delta, p.c), (b.delta, b.c));
        assert!(plan_tradeoff(1.0, 1, 6, 0).is_err());
        assert!(plan_tradeoff(0.0, 1, 6, 1).is_err());
        let mut last = f64::INFINITY;
        for k in 1..=6 {
            let c = plan_tradeoff(1.0, 2, 6, k).unwrap().c;
            assert!(c <= last);
            last = c;
        }
    }

    #[test]
    fn one_block_matches_basic_hash_cells() {
        let params = plan_tradeoff(0.3, 1, 4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Curve::from_values("p", &[0.0, 1.0, 1.1, 5.0]).unwrap();
        let shift = crate::grid::sample_shift(params.delta, 1, &mut rng);
        let part = sample_partition(4, 1, &mut rng);
        let key = tradeoff_hash(&p, &params, std::slice::from_ref(&shift), &part).unwrap();
        assert_eq!(key.cells(), snap_to_grid(&p, &shift).unwrap().cells());
    }

    #[test]
    fn concatenation_keeps_block_boundaries() {
        let params = plan_tradeoff(0.25, 1, 4, 2).unwrap();
        assert_eq!(params.delta, 2.0);
        let shifts = vec![GridShift::zero(2.0, 1).unwrap(), GridShift::zero(2.0, 1).unwrap()];
        let p = Curve::from_values("p", &[0.0, 2.0, 2.1, 4.0]).unwrap();
        let part = PartitionSpec::new(4, vec![2], PartitionKind::SampledInput).unwrap();
        // Blocks (0, 2) and (2, 2.1, 4): the shared vertex appears twice.
        assert_eq!(tradeoff_hash(&p, &params, &shifts, &part).unwrap().cells(), &[0, 1, 1, 2]);
        let short = PartitionSpec::new(3, vec![2], PartitionKind::SampledInput).unwrap();
        assert!(matches!(tradeoff_hash(&p, &params, &shifts, &short), Err(Error::LengthMismatch { .. })));
        assert!(tradeoff_hash(&p, &params, &shifts[..1], &part).is_err());
    }
}
