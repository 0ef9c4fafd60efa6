//! Continuous Fréchet hashing on the real line, and δ-signatures.
//!
//! The hash snaps a 1D curve to a shifted grid and then deletes every
//! vertex lying in the closed segment spanned by its neighbours, until no
//! such vertex remains. The result is canonical: two snapped curves at
//! continuous Fréchet distance zero produce the same vertex sequence.
//!
//! Signatures are a simplification obtained by contracting short edges in
//! increasing order of length. They are used to check where any nearby
//! curve must place vertices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::grid::{
    check_count, check_positive, shift_tag, snap_coordinate, GridShift, LatticeKey, Metric, Scheme, SchemeParams,
};

/// Continuous scheme: `delta = 4 m r`, `c = 4 m`, `d = 1`.
pub fn plan_continuous(r: f64, m: usize) -> Result<SchemeParams> {
    check_positive("r", r)?;
    check_count("m", m)?;
    Ok(SchemeParams {
        scheme: Scheme::Continuous1d,
        metric: Metric::Frechet,
        r,
        c: 4.0 * m as f64,
        delta: 4.0 * m as f64 * r,
        dim: 1,
        max_len: m,
    })
}

#[inline]
fn in_closed<T: PartialOrd + Copy>(x: T, a: T, b: T) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= x && x <= hi
}

/// Indices of the vertices that survive repeated removal of interior
/// vertices lying in the closed segment of their neighbours.
pub(crate) fn extremal_indices<T: PartialOrd + Copy>(values: &[T]) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::with_capacity(values.len());
    for (i, &x) in values.iter().enumerate() {
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let below = stack[stack.len() - 2];
            if in_closed(values[top], values[below], x) {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    stack
}

fn require_1d(p: &Curve) -> Result<()> {
    if p.dim() == 1 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: p.dim(), right: 1 })
    }
}

/// Snaps to the shifted grid, drops consecutive duplicates, then removes
/// non-extremal vertices to a fixpoint.
pub fn continuous_hash(p: &Curve, params: &SchemeParams, shift: &GridShift) -> Result<LatticeKey> {
    require_1d(p)?;
    if params.scheme != Scheme::Continuous1d {
        return Err(Error::InvalidParameter(format!(
            "continuous_hash needs continuous1d params, got {}",
            params.scheme.name()
        )));
    }
    if shift.dim() != 1 {
        return Err(Error::DimensionMismatch { left: 1, right: shift.dim() });
    }
    if shift.delta() != params.delta {
        return Err(Error::InvalidParameter("shift resolution differs from params".into()));
    }
    let mut snapped: Vec<i64> =
        p.coords().iter().map(|&x| snap_coordinate(x, shift.delta(), shift.offset()[0])).collect();
    snapped.dedup();
    let cells = extremal_indices(&snapped).into_iter().map(|i| snapped[i]).collect();
    Ok(LatticeKey::from_parts(shift_tag(Scheme::Continuous1d.code(), shift), 1, cells))
}

/// A δ-signature: a subsequence of the vertices of its parent curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature1D {
    parent_id: String,
    delta: f64,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Signature1D {
    pub fn parent_id(&self) -> &str {
        &self.parent_id
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Positions of the signature vertices in the parent curve.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Doubly linked list over vertex positions with lazy edge contraction.
struct Contraction<'a> {
    values: &'a [f64],
    prev: Vec<usize>,
    next: Vec<usize>,
    alive: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, usize, usize)>>,
}

impl<'a> Contraction<'a> {
    fn new(values: &'a [f64], kept: &[usize]) -> Self {
        let n = values.len();
        let mut c = Contraction {
            values,
            prev: vec![usize::MAX; n],
            next: vec![usize::MAX; n],
            alive: vec![false; n],
            heap: BinaryHeap::new(),
        };
        for &i in kept {
            c.alive[i] = true;
        }
        for w in kept.windows(2) {
            c.link(w[0], w[1]);
        }
        c
    }

    fn last(&self) -> usize {
        self.values.len() - 1
    }

    /// Edges at either end count double, so they are contracted only when
    /// shorter than half of the inner edges.
    fn key(&self, a: usize, b: usize) -> f64 {
        let len = (self.values[b] - self.values[a]).abs();
        if a == 0 || b == self.last() {
            2.0 * len
        } else {
            len
        }
    }

    fn link(&mut self, a: usize, b: usize) {
        self.next[a] = b;
        self.prev[b] = a;
        // Non-negative floats order like their bit patterns.
        self.heap.push(Reverse((self.key(a, b).to_bits(), a, b)));
    }

    fn unlink(&mut self, x: usize) {
        self.alive[x] = false;
        let (a, b) = (self.prev[x], self.next[x]);
        self.link(a, b);
    }

    fn is_redundant(&self, x: usize) -> bool {
        x != 0
            && x != self.last()
            && self.alive[x]
            && in_closed(self.values[x], self.values[self.prev[x]], self.values[self.next[x]])
    }

    fn cleanup(&mut self, mut pending: Vec<usize>) {
        while let Some(x) = pending.pop() {
            if self.is_redundant(x) {
                let (a, b) = (self.prev[x], self.next[x]);
                self.unlink(x);
                pending.push(a);
                pending.push(b);
            }
        }
    }

    fn run(&mut self, threshold: f64) {
        let last = self.last();
        while let Some(Reverse((bits, a, b))) = self.heap.pop() {
            if !self.alive[a] || self.next[a] != b {
                continue;
            }
            if f64::from_bits(bits) > threshold {
                break;
            }
            if a == 0 && b == last {
                continue;
            }
            if a == 0 {
                self.unlink(b);
            } else if b == last {
                self.unlink(a);
            } else {
                self.unlink(a);
                self.unlink(b);
            }
            let (l, r) = if a == 0 { (a, self.next[a]) } else { (self.prev[a], self.next[self.prev[a]]) };
            self.cleanup(vec![l, r]);
        }
    }

    fn survivors(&self) -> Vec<usize> {
        let mut out = vec![0];
        let mut x = 0;
        while x != self.last() {
            x = self.next[x];
            out.push(x);
        }
        out
    }
}

/// Computes the `delta`-signature of a 1D curve by contracting the shortest
/// edge while its length is at most `2 * delta` (end edges: at most
/// `delta`), restoring non-degeneracy after each contraction.
///
/// Ties are broken by the left vertex position, so the output is
/// deterministic and nested: the vertices for a larger `delta` are a subset
/// of those for a smaller one. A curve whose extremal vertices are just its
/// two endpoints keeps both, even when they are closer than `delta`.
pub fn compute_signature(p: &Curve, delta: f64) -> Result<Signature1D> {
    require_1d(p)?;
    check_positive("delta", delta)?;
    let values = p.coords();
    let indices = if values.len() == 1 {
        vec![0]
    } else {
        let mut c = Contraction::new(values, &extremal_indices(values));
        c.run(2.0 * delta);
        c.survivors()
    };
    Ok(Signature1D {
        parent_id: p.id().to_string(),
        delta,
        values: indices.iter().map(|&i| values[i]).collect(),
        indices,
    })
}

/// Intervals `[v_i - eps, v_i + eps]` around the signature vertices.
pub fn signature_ranges(sig: &Signature1D, eps: f64) -> Result<Vec<(f64, f64)>> {
    if !(eps > 0.0 && eps <= sig.delta) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, {}], got {eps}", sig.delta)));
    }
    Ok(sig.values.iter().map(|&v| (v - eps, v + eps)).collect())
}

/// Greedily matches vertices of `values` to `ranges` in order, preferring
/// distinct vertices and falling back to allowing a vertex to serve
/// consecutive overlapping ranges. Returns the matched positions.
pub fn match_ranges(values: &[f64], ranges: &[(f64, f64)]) -> Option<Vec<usize>> {
    let greedy = |strict: bool| {
        let mut out = Vec::with_capacity(ranges.len());
        let mut from = 0;
        for &(lo, hi) in ranges {
            let hit = (from..values.len()).find(|&j| lo <= values[j] && values[j] <= hi)?;
            out.push(hit);
            from = if strict { hit + 1 } else { hit };
        }
        Some(out)
    };
    greedy(true).or_else(|| greedy(false))
}

/// A failed signature condition, with the signature edge or vertex where
/// it fails (0-based).
#[derive(Debug, Clone, PartialEq)]
pub enum SignatureViolation {
    NotSubsequence,
    NonDegeneracy { vertex: usize },
    DirectionPreserving { edge: usize, backtrack: f64 },
    MinimumEdgeLength { edge: usize, length: f64 },
    Range { edge: usize, value: f64 },
}

impl fmt::Display for SignatureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSubsequence => write!(f, "vertices are not an ordered subsequence including both ends"),
            Self::NonDegeneracy { vertex } => write!(f, "vertex {vertex} lies between its neighbours"),
            Self::DirectionPreserving { edge, backtrack } => {
                write!(f, "edge {edge} backtracks by {backtrack}")
            }
            Self::MinimumEdgeLength { edge, length } => write!(f, "edge {edge} has length {length}"),
            Self::Range { edge, value } => write!(f, "edge {edge} leaves its range at {value}"),
        }
    }
}

/// Checks the four defining conditions of a δ-signature against the parent
/// curve: non-degeneracy, direction preservation, minimum edge length and
/// range. Each condition is checked on its own, in that order.
///
/// A two-vertex signature is exempt from the minimum edge length, since
/// nothing is left to contract.
pub fn verify_signature(p: &Curve, sig: &Signature1D) -> std::result::Result<(), SignatureViolation> {
    let values = p.coords();
    let idx = &sig.indices;
    let k = idx.len();
    let delta = sig.delta;
    if k == 0
        || idx[0] != 0
        || idx[k - 1] != values.len() - 1
        || idx.windows(2).any(|w| w[0] >= w[1])
        || idx.iter().zip(&sig.values).any(|(&i, &v)| values[i] != v)
    {
        return Err(SignatureViolation::NotSubsequence);
    }
    let v = &sig.values;
    for i in 1..k.saturating_sub(1) {
        if in_closed(v[i], v[i - 1], v[i + 1]) {
            return Err(SignatureViolation::NonDegeneracy { vertex: i });
        }
    }
    for e in 0..k.saturating_sub(1) {
        let piece = &values[idx[e]..=idx[e + 1]];
        let backtrack = if v[e] < v[e + 1] {
            max_drop(piece.iter().copied())
        } else if v[e] > v[e + 1] {
            max_drop(piece.iter().map(|x| -x))
        } else {
            0.0
        };
        if backtrack > 2.0 * delta {
            return Err(SignatureViolation::DirectionPreserving { edge: e, backtrack });
        }
    }
    if k > 2 {
        for e in 0..k - 1 {
            let length = (v[e + 1] - v[e]).abs();
            let min = if e == 0 || e == k - 2 { delta } else { 2.0 * delta };
            if length <= min {
                return Err(SignatureViolation::MinimumEdgeLength { edge: e, length });
            }
        }
    }
    for e in 0..k.saturating_sub(1) {
        let near = |x: f64, c: f64| (x - c).abs() <= delta;
        for &x in &values[idx[e]..=idx[e + 1]] {
            let ok = in_closed(x, v[e], v[e + 1]) || (e == 0 && near(x, v[0])) || (e == k - 2 && near(x, v[k - 1]));
            if !ok {
                return Err(SignatureViolation::Range { edge: e, value: x });
            }
        }
    }
    Ok(())
}

/// Largest `x_i - x_j` with `i < j`.
fn max_drop(xs: impl Iterator<Item = f64>) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut best = 0.0f64;
    for x in xs {
        peak = peak.max(x);
        best = best.max(peak - x);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::continuous_frechet_1d;
    use crate::grid::sample_shift;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(values: &[f64]) -> Curve {
        Curve::from_values("p", values).unwrap()
    }

    fn sig(values: &[f64], delta: f64) -> Vec<f64> {
        let p = c(values);
        let s = compute_signature(&p, delta).unwrap();
        verify_signature(&p, &s).unwrap();
        s.values().to_vec()
    }

    #[test]
    fn signature_examples() {
        assert_eq!(sig(&[0.0, 5.0], 1.0), vec![0.0, 5.0]);
        assert_eq!(sig(&[0.0, 5.0], 4.9), vec![0.0, 5.0]);
        assert_eq!(sig(&[0.0, 3.0, 1.0, 8.0], 0.4), vec![0.0, 3.0, 1.0, 8.0]);
        assert_eq!(sig(&[0.0, 3.0, 2.5, 8.0], 1.0), vec![0.0, 8.0]);
        assert_eq!(sig(&[2.0], 1.0), vec![2.0]);
    }

    #[test]
    fn end_edges_use_half_threshold() {
        // The first edge has length 1.5: kept for delta = 1, contracted for 2.
        assert_eq!(sig(&[0.0, 1.5, -6.0, 6.0], 1.0), vec![0.0, 1.5, -6.0, 6.0]);
        assert_eq!(sig(&[0.0, 1.5, -6.0, 6.0], 2.0), vec![0.0, -6.0, 6.0]);
    }

    #[test]
    fn degenerate_two_vertex_signature() {
        let p = c(&[0.0, 1.0, 0.0]);
        let s = compute_signature(&p, 1.0).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0]);
        verify_signature(&p, &s).unwrap();
    }

    #[test]
    fn verifier_catches_each_condition() {
        let p = c(&[0.0, 3.0, 1.0, 8.0]);
        let fake = |indices: Vec<usize>, delta: f64| Signature1D {
            parent_id: "p".into(),
            delta,
            values: indices.iter().map(|&i| p.coords()[i]).collect(),
            indices,
        };
        assert_eq!(verify_signature(&p, &fake(vec![1, 3], 0.4)), Err(SignatureViolation::NotSubsequence));
        assert!(matches!(
            verify_signature(&p, &fake(vec![0, 3], 0.4)),
            Err(SignatureViolation::DirectionPreserving { edge: 0, .. })
        ));
        assert!(matches!(
            verify_signature(&p, &fake(vec![0, 1, 2, 3], 1.5)),
            Err(SignatureViolation::MinimumEdgeLength { edge: 1, .. })
        ));
        // Overshoots the edge 5 -> 3 by 0.5, which is allowed backtracking.
        let q = c(&[0.0, 5.0, 5.5, 3.0, 12.0]);
        let s = Signature1D {
            parent_id: "q".into(),
            delta: 0.4,
            indices: vec![0, 1, 3, 4],
            values: vec![0.0, 5.0, 3.0, 12.0],
        };
        assert!(matches!(
            verify_signature(&q, &s),
            Err(SignatureViolation::Range { edge: 1, value }) if value == 5.5
        ));
        let flat = c(&[0.0, 1.0, 2.0]);
        let s = Signature1D { parent_id: "f".into(), delta: 0.1, indices: vec![0, 1, 2], values: vec![0.0, 1.0, 2.0] };
        assert_eq!(verify_signature(&flat, &s), Err(SignatureViolation::NonDegeneracy { vertex: 1 }));
    }

    fn random_walk<R: Rng>(rng: &mut R, m: usize) -> Curve {
        let mut x = 0.0;
        let values: Vec<f64> = (0..m)
            .map(|_| {
                x += rng.random_range(-1.0..1.0) * 10f64.powf(rng.random_range(-2.0..1.0));
                x
            })
            .collect();
        c(&values)
    }

    #[test]
    fn random_signatures_are_valid_and_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let m = rng.random_range(1..=40);
            let p = random_walk(&mut rng, m);
            let mut previous: Option<Vec<usize>> = None;
            for e in -3..=1 {
                let delta = 10f64.powi(e) * rng.random_range(1.0..3.0);
                let s = compute_signature(&p, delta).unwrap();
                if let Err(v) = verify_signature(&p, &s) {
                    panic!("{:?} delta={delta}: {v}", p.coords());
                }
                if let Some(prev) = &previous {
                    assert!(s.indices().iter().all(|i| prev.contains(i)));
                }
                previous = Some(s.indices().to_vec());
            }
        }
    }

    #[test]
    fn ranges_and_matching() {
        let p = c(&[0.0, 3.0, 2.5, 8.0]);
        let s = compute_signature(&p, 1.0).unwrap();
        assert_eq!(signature_ranges(&s, 1.0).unwrap(), vec![(-1.0, 1.0), (7.0, 9.0)]);
        assert!(signature_ranges(&s, 0.0).is_err());
        assert!(signature_ranges(&s, 1.5).is_err());
        let ranges = signature_ranges(&s, 0.5).unwrap();
        assert_eq!(match_ranges(p.coords(), &ranges), Some(vec![0, 3]));
        assert_eq!(match_ranges(&[8.0, 0.0], &ranges), None);
        assert_eq!(match_ranges(&[0.0], &[(-1.0, 1.0), (-0.5, 0.5)]), Some(vec![0, 0]));
    }

    #[test]
    fn continuous_hash_examples() {
        let params = plan_continuous(0.5, 1).unwrap();
        assert_eq!(params.delta, 2.0);
        let zero = GridShift::zero(2.0, 1).unwrap();
        let h = |v: &[f64]| continuous_hash(&c(v), &params, &zero).unwrap().cells().to_vec();
        assert_eq!(h(&[0.4, 3.1, 6.2]), vec![0, 3]);
        assert_eq!(h(&[0.4, 3.1, 0.2]), vec![0, 2, 0]);
        assert_eq!(h(&[0.4]), vec![0]);
        assert_eq!(h(&[0.4, 0.6]), vec![0]);
        assert_eq!(h(&[0.0, 4.0, 4.0, 2.0, 6.0]), vec![0, 2, 1, 3]);
        assert!(continuous_hash(&Curve::new("x", vec![vec![0.0, 0.0]]).unwrap(), &params, &zero).is_err());
    }

    #[test]
    fn planner_examples() {
        let p = plan_continuous(1.0, 3).unwrap();
        assert_eq!((p.delta, p.c), (12.0, 12.0));
        let p = plan_continuous(0.5, 2).unwrap();
        assert_eq!((p.delta, p.c), (4.0, 8.0));
        let p = plan_continuous(1.0, 1).unwrap();
        assert_eq!((p.delta, p.c), (4.0, 4.0));
        assert!(plan_continuous(0.0, 1).is_err());
        assert!(plan_continuous(1.0, 0).is_err());
    }

    #[test]
    fn continuous_hash_is_idempotent_and_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let params = plan_continuous(0.1, 4).unwrap();
        for _ in 0..2000 {
            let shift = sample_shift(params.delta, 1, &mut rng);
            let (m1, m2) = (rng.random_range(1..10), rng.random_range(1..10));
            let p = random_walk(&mut rng, m1);
            let q = random_walk(&mut rng, m2);
            let key = continuous_hash(&p, &params, &shift).unwrap();
            let back: Vec<f64> = key.cells().iter().map(|&j| shift.cell_coordinate(0, j)).collect();
            assert_eq!(continuous_hash(&c(&back), &params, &shift).unwrap(), key);
            if key == continuous_hash(&q, &params, &shift).unwrap() {
                assert!(continuous_frechet_1d(&p, &q).unwrap() <= params.delta + 1e-9);
            }
        }
    }
}
