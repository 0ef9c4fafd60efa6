#![allow(dead_code)]

use curvehash::{enumerate_traversals, Curve, DistanceKind};
use rand::Rng;

fn uniform<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> f64 {
    if half_width > 0.0 {
        rng.random_range(-half_width..=half_width)
    } else {
        0.0
    }
}

/// Random walk with per-coordinate steps in `[-step, step]`.
pub fn walk<R: Rng + ?Sized>(rng: &mut R, m: usize, dim: usize, step: f64) -> Curve {
    let mut coords = Vec::with_capacity(m * dim);
    let mut at: Vec<f64> = (0..dim).map(|_| uniform(rng, step)).collect();
    for _ in 0..m {
        coords.extend_from_slice(&at);
        for x in &mut at {
            *x += uniform(rng, step);
        }
    }
    Curve::from_flat("walk", dim, coords).unwrap()
}

/// Uniformly random vertices in `[-spread, spread]^d`.
pub fn scatter<R: Rng + ?Sized>(rng: &mut R, m: usize, dim: usize, spread: f64) -> Curve {
    let coords = (0..m * dim).map(|_| uniform(rng, spread)).collect();
    Curve::from_flat("scatter", dim, coords).unwrap()
}

/// Moves every coordinate by at most `eps`.
pub fn jitter<R: Rng + ?Sized>(rng: &mut R, p: &Curve, eps: f64) -> Curve {
    let coords = p.coords().iter().map(|&x| x + uniform(rng, eps)).collect();
    Curve::from_flat("jitter", p.dim(), coords).unwrap()
}

/// Monotone resampling of `p` to `m` vertices that keeps both endpoints
/// when `m >= 2`; vertices may repeat or be dropped.
pub fn warp<R: Rng + ?Sized>(rng: &mut R, p: &Curve, m: usize) -> Curve {
    let last = p.len() - 1;
    let mut idx: Vec<usize> = (0..m).map(|_| rng.random_range(0..=last)).collect();
    idx.sort_unstable();
    if m >= 2 {
        idx[0] = 0;
        idx[m - 1] = last;
    }
    let coords = idx.iter().flat_map(|&i| p.point(i).to_vec()).collect();
    Curve::from_flat("warp", p.dim(), coords).unwrap()
}

/// Duplicates random vertices of `p` until it has `m >= p.len()` vertices;
/// the discrete Fréchet distance to `p` is zero.
pub fn stretch<R: Rng + ?Sized>(rng: &mut R, p: &Curve, m: usize) -> Curve {
    assert!(m >= p.len());
    let mut counts = vec![1; p.len()];
    for _ in p.len()..m {
        counts[rng.random_range(0..p.len())] += 1;
    }
    let coords = counts.iter().enumerate().flat_map(|(i, &k)| p.point(i).repeat(k)).collect();
    Curve::from_flat("stretch", p.dim(), coords).unwrap()
}

/// Random 1D curve with extra vertices inserted on its edges; the
/// continuous Fréchet distance to the original is zero.
pub fn subdivide<R: Rng + ?Sized>(rng: &mut R, p: &Curve, extra: usize) -> Curve {
    assert_eq!(p.dim(), 1);
    let v = p.coords();
    if v.len() < 2 {
        return p.clone();
    }
    let mut inserts: Vec<(usize, f64)> =
        (0..extra).map(|_| (rng.random_range(0..v.len() - 1), rng.random_range(0.0..1.0))).collect();
    inserts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(v.len() + extra);
    let mut k = 0;
    for i in 0..v.len() {
        out.push(v[i]);
        while k < inserts.len() && inserts[k].0 == i {
            let t = inserts[k].1;
            out.push(v[i] + t * (v[i + 1] - v[i]));
            k += 1;
        }
    }
    Curve::from_values("subdivided", &out).unwrap()
}

/// A pair whose distance ranges from zero to far beyond `scale`: either two
/// independent walks or a warped, jittered copy.
pub fn fuzz_pair<R: Rng + ?Sized>(rng: &mut R, max_len: usize, dim: usize, scale: f64) -> (Curve, Curve) {
    let m1 = rng.random_range(1..=max_len);
    let m2 = rng.random_range(1..=max_len);
    let p = walk(rng, m1, dim, scale);
    let q = if rng.random_range(0..4) == 0 {
        walk(rng, m2, dim, scale)
    } else {
        let eps = scale * rng.random_range(0.0..2.0);
        let w = warp(rng, &p, m2);
        jitter(rng, &w, eps)
    };
    (p, q)
}

/// Brute-force distance: minimum over every admissible traversal, `None`
/// when no traversal satisfies the constraint.
pub fn brute_force(p: &Curve, q: &Curve, kind: DistanceKind) -> Option<f64> {
    enumerate_traversals(p.len(), q.len())
        .unwrap()
        .into_iter()
        .filter(|t| match kind {
            DistanceKind::AnchoredFrechet(w) | DistanceKind::AnchoredDtw(w) => t.max_index_gap() <= w / 2,
            DistanceKind::SpeedFrechet(w) | DistanceKind::SpeedDtw(w) => t.max_degree() <= w,
            _ => true,
        })
        .map(|t| if kind.is_sum() { t.sum_cost(p, q) } else { t.max_cost(p, q) })
        .min_by(f64::total_cmp)
}
