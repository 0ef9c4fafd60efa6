use super::{euclidean, Curve};
use crate::error::{Error, Result};

/// Largest curve length accepted by [`enumerate_traversals`].
pub const MAX_ENUMERATION_LEN: usize = 8;

/// A monotone pairing of vertex indices (0-based) of two curves.
///
/// Starts at `(0, 0)`, ends at `(m1 - 1, m2 - 1)`, and every step advances
/// `i`, `j` or both by exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Traversal {
    pairs: Vec<(usize, usize)>,
}

impl Traversal {
    pub fn new(pairs: Vec<(usize, usize)>, m1: usize, m2: usize) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("invalid traversal: {msg}")));
        if m1 == 0 || m2 == 0 {
            return bad("curve lengths must be positive");
        }
        match (pairs.first(), pairs.last()) {
            (Some(&(0, 0)), Some(&last)) if last == (m1 - 1, m2 - 1) => {}
            _ => return bad("must start at (0,0) and end at (m1-1,m2-1)"),
        }
        for w in pairs.windows(2) {
            let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if di > 1 || dj > 1 || di + dj == 0 {
                return bad("steps must advance by 0 or 1 in each index, and not stall");
            }
        }
        Ok(Traversal { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_cost(&self, p: &Curve, q: &Curve) -> f64 {
        self.pairs.iter().map(|&(i, j)| euclidean(p.point(i), q.point(j))).fold(0.0, f64::max)
    }

    pub fn sum_cost(&self, p: &Curve, q: &Curve) -> f64 {
        self.pairs.iter().map(|&(i, j)| euclidean(p.point(i), q.point(j))).sum()
    }

    /// Largest `|i - j|` over all pairs; the traversal is `w`-anchored iff
    /// this is at most `w / 2`.
    pub fn max_index_gap(&self) -> usize {
        self.pairs.iter().map(|&(i, j)| i.abs_diff(j)).max().unwrap_or(0)
    }

    /// Largest number of partners of any vertex; the traversal is a
    /// `w`-speed traversal iff this is at most `w`.
    pub fn max_degree(&self) -> usize {
        let mut best = 0;
        let mut run_i = 0;
        let mut run_j = 0;
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if k == 0 {
                run_i = 1;
                run_j = 1;
            } else {
                let (pi, pj) = self.pairs[k - 1];
                run_i = if i == pi { run_i + 1 } else { 1 };
                run_j = if j == pj { run_j + 1 } else { 1 };
            }
            best = best.max(run_i).max(run_j);
        }
        best
    }

    /// Splits the pairs into connected components of the bipartite pairing
    /// graph. Consecutive pairs are connected iff they share an index, i.e.
    /// components break exactly at diagonal steps.
    pub fn components(&self) -> Vec<&[(usize, usize)]> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..self.pairs.len() {
            let (pi, pj) = self.pairs[k - 1];
            let (i, j) = self.pairs[k];
            if i != pi && j != pj {
                out.push(&self.pairs[start..k]);
                start = k;
            }
        }
        out.push(&self.pairs[start..]);
        out
    }

    /// Removes the middle pair of every `(i,j),(i,j+1),(i+1,j+1)` and
    /// `(i,j),(i+1,j),(i+1,j+1)` pattern until every component is a star.
    ///
    /// The result is a subsequence of `self`, so neither its max cost nor
    /// its sum cost can be larger.
    pub fn normalize(&self) -> Traversal {
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(self.pairs.len());
        for &pair in &self.pairs {
            if out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                let first_steps_j = a.0 == b.0;
                let first_steps_i = a.1 == b.1;
                let second_steps_i = pair.1 == b.1;
                let second_steps_j = pair.0 == b.0;
                if (first_steps_j && second_steps_i) || (first_steps_i && second_steps_j) {
                    // a -> pair is a diagonal step, so the middle pair can go.
                    out.pop();
                }
            }
            out.push(pair);
        }
        Traversal { pairs: out }
    }
}

/// Enumerates every traversal of curves with `m1` and `m2` vertices.
///
/// The count is the Delannoy number `D(m1-1, m2-1)`; lengths are capped at
/// [`MAX_ENUMERATION_LEN`] to keep it small.
pub fn enumerate_traversals(m1: usize, m2: usize) -> Result<Vec<Traversal>> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidParameter("curve lengths must be positive".into()));
    }
    if m1 > MAX_ENUMERATION_LEN || m2 > MAX_ENUMERATION_LEN {
        return Err(Error::EnumerationTooLarge { m1, m2 });
    }
    let mut out = Vec::new();
    let mut path = vec![(0, 0)];
    extend(&mut path, m1, m2, &mut out);
    Ok(out)
}

fn extend(path: &mut Vec<(usize, usize)>, m1: usize, m2: usize, out: &mut Vec<Traversal>) {
    let (i, j) = *path.last().expect("path starts non-empty");
    if (i, j) == (m1 - 1, m2 - 1) {
        out.push(Traversal { pairs: path.clone() });
        return;
    }
    for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
        let (ni, nj) = (i + di, j + dj);
        if ni < m1 && nj < m2 {
            path.push((ni, nj));
            extend(path, m1, m2, out);
            path.pop();
        }
    }
}
