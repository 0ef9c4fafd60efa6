//! Continuous Fréchet distance for curves on the real line, by binary
//! search over a free-space reachability decision procedure.

use super::{discrete_frechet, Curve};
use crate::error::{Error, Result};

/// Absolute accuracy of [`continuous_frechet_1d`].
pub const CONTINUOUS_TOLERANCE: f64 = 1e-9;

/// Closed sub-interval of `[0, 1]`; `None` is empty.
type Free = Option<(f64, f64)>;

/// Parameters `t` in `[0, 1]` with `|x - (a + t (b - a))| <= eps`.
fn free_interval(x: f64, a: f64, b: f64, eps: f64) -> Free {
    let len = b - a;
    if len == 0.0 {
        return ((x - a).abs() <= eps).then_some((0.0, 1.0));
    }
    let t1 = (x - eps - a) / len;
    let t2 = (x + eps - a) / len;
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    (lo <= hi).then_some((lo, hi))
}

/// Decides whether the continuous Fréchet distance of two 1D curves is at
/// most `eps`.
pub fn frechet_1d_decision(p: &[f64], q: &[f64], eps: f64) -> bool {
    let (n, m) = (p.len(), q.len());
    if (p[0] - q[0]).abs() > eps || (p[n - 1] - q[m - 1]).abs() > eps {
        return false;
    }
    // A single vertex must stay within eps of the whole other curve, and
    // the extremes of a polygonal curve are at its vertices.
    if n == 1 {
        return q.iter().all(|&y| (y - p[0]).abs() <= eps);
    }
    if m == 1 {
        return p.iter().all(|&x| (x - q[0]).abs() <= eps);
    }
    let (cells_p, cells_q) = (n - 1, m - 1);
    // left[i][j]: reachable part of the edge {P = p_i} x Q-segment j.
    // bottom[i][j]: reachable part of P-segment i x {Q = q_j}.
    let mut left = vec![vec![None; cells_q]; n];
    let mut bottom = vec![vec![None; m]; cells_p];

    let mut open = true;
    for j in 0..cells_q {
        let f = free_interval(p[0], q[j], q[j + 1], eps);
        left[0][j] = if open { f.filter(|&(lo, _)| lo == 0.0) } else { None };
        open = matches!(left[0][j], Some((0.0, 1.0)));
    }
    open = true;
    for i in 0..cells_p {
        let f = free_interval(q[0], p[i], p[i + 1], eps);
        bottom[i][0] = if open { f.filter(|&(lo, _)| lo == 0.0) } else { None };
        open = matches!(bottom[i][0], Some((0.0, 1.0)));
    }

    for i in 0..cells_p {
        for j in 0..cells_q {
            let from_left: Free = left[i][j];
            let from_bottom: Free = bottom[i][j];
            let right = free_interval(p[i + 1], q[j], q[j + 1], eps);
            let top = free_interval(q[j + 1], p[i], p[i + 1], eps);
            left[i + 1][j] = match (from_bottom, from_left) {
                (Some(_), _) => right,
                (None, Some((lo, _))) => right.and_then(|(a, b)| {
                    let a = a.max(lo);
                    (a <= b).then_some((a, b))
                }),
                (None, None) => None,
            };
            bottom[i][j + 1] = match (from_left, from_bottom) {
                (Some(_), _) => top,
                (None, Some((lo, _))) => top.and_then(|(a, b)| {
                    let a = a.max(lo);
                    (a <= b).then_some((a, b))
                }),
                (None, None) => None,
            };
        }
    }
    matches!(left[n - 1][cells_q - 1], Some((_, hi)) if hi >= 1.0)
}

/// Continuous Fréchet distance between two curves in `R^1`, accurate to
/// [`CONTINUOUS_TOLERANCE`]. The returned value is an upper end of the
/// final bracket, so it never underestimates by more than floating error.
pub fn continuous_frechet_1d(p: &Curve, q: &Curve) -> Result<f64> {
    if p.dim() != 1 || q.dim() != 1 {
        return Err(Error::InvalidParameter(format!(
            "continuous Fréchet is implemented for d = 1 only, got {} and {}",
            p.dim(),
            q.dim()
        )));
    }
    let (a, b) = (p.coords(), q.coords());
    if frechet_1d_decision(a, b, 0.0) {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    // The discrete distance is always an admissible upper bound.
    let mut hi = discrete_frechet(p, q)?;
    while hi - lo > CONTINUOUS_TOLERANCE * 0.5 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if frechet_1d_decision(a, b, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
