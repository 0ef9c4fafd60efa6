//! Monte-Carlo checks of a scheme's near and far collision claims.

use curvehash::estimate::estimate_collision_probability;
use curvehash::grid::{Metric, Scheme, SchemeParams};
use curvehash::index::{certified_distance, near_collision_log2_inverse};
use curvehash::{constrained_distance, Curve, DistanceKind, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{BoundArg, SchemeArgs};
use crate::commands::plan_scheme;
use crate::error::{CliError, Result};

const CONFIDENCE_ALPHA: f64 = 0.01;
const MIN_TRIALS: u64 = 100;
const MAX_PAIR_DRAWS: usize = 10_000;

#[derive(Debug, Serialize)]
pub struct SchemeDescriptor {
    pub name: &'static str,
    pub metric: &'static str,
    pub r: f64,
    pub c: f64,
    pub delta: f64,
    pub dim: usize,
    pub max_len: usize,
}

#[derive(Debug, Serialize)]
pub struct PairDescriptor {
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub distance_kind: String,
    pub distance: f64,
}

/// Outcome of a probe; `verdict` is `pass` iff the estimate plus the
/// one-sided 99% Hoeffding half-width reaches a lower bound, or the
/// estimate is exactly zero for a zero-collision claim.
#[derive(Debug, Serialize)]
pub struct ProbeReport {
    pub scheme: SchemeDescriptor,
    pub pair: PairDescriptor,
    pub claim: &'static str,
    pub bound: f64,
    pub estimate: f64,
    pub collisions: u64,
    pub trials: u64,
    pub half_width: f64,
    pub rule: &'static str,
    pub verdict: &'static str,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

fn parse_curve(id: &str, json: &str) -> Result<Curve> {
    let points: Vec<Vec<f64>> = serde_json::from_str(json).map_err(|e| CliError::Input(format!("--{id}: {e}")))?;
    Ok(Curve::new(id, points)?)
}

/// Distance under which the near claim is stated.
fn near_kind(params: &SchemeParams) -> DistanceKind {
    match (params.scheme, params.metric) {
        (Scheme::Continuous1d, _) => DistanceKind::ContinuousFrechet1d,
        (Scheme::Anchored { width, .. }, Metric::Frechet) => DistanceKind::AnchoredFrechet(width),
        (Scheme::Anchored { width, .. }, Metric::Dtw) => DistanceKind::AnchoredDtw(width),
        (Scheme::Speed { width, .. }, Metric::Frechet) => DistanceKind::SpeedFrechet(width),
        (Scheme::Speed { width, .. }, Metric::Dtw) => DistanceKind::SpeedDtw(width),
        (_, Metric::Frechet) => DistanceKind::Frechet,
        (_, Metric::Dtw) => DistanceKind::Dtw,
    }
}

fn distance(p: &Curve, q: &Curve, kind: DistanceKind) -> Result<f64> {
    match constrained_distance(p, q, kind) {
        Err(Error::Infeasible(_)) => Ok(f64::INFINITY),
        other => Ok(other?),
    }
}

/// Near-pair collision bound for the pair's lengths. Constrained schemes
/// use the shorter length; the others the longer one.
fn near_bound(params: &SchemeParams, p: &Curve, q: &Curve) -> Result<f64> {
    let m = match params.scheme {
        Scheme::Anchored { .. } | Scheme::Speed { .. } => p.len().min(q.len()),
        _ => p.len().max(q.len()),
    };
    Ok((-near_collision_log2_inverse(&params.with_max_len(m))?).exp2())
}

fn walk<R: Rng>(rng: &mut R, id: &str, m: usize, dim: usize, step: f64, origin: f64) -> Result<Curve> {
    let mut at: Vec<f64> = (0..dim).map(|_| origin).collect();
    let mut coords = Vec::with_capacity(m * dim);
    for _ in 0..m {
        coords.extend_from_slice(&at);
        for x in &mut at {
            *x += rng.random_range(-step..=step);
        }
    }
    Ok(Curve::from_flat(id, dim, coords)?)
}

/// Draws a pair satisfying the hypothesis of the chosen claim.
fn generate_pair<R: Rng>(
    args: &SchemeArgs,
    bound: BoundArg,
    m: usize,
    dim: usize,
    rng: &mut R,
) -> Result<(Curve, Curve)> {
    let params = plan_scheme(args, dim, m)?;
    let step = params.delta / 2.0;
    for _ in 0..MAX_PAIR_DRAWS {
        let p = walk(rng, "p", m, dim, step, 0.0)?;
        let q = match bound {
            BoundArg::Near => {
                // Per-vertex moves below r / 2 in norm, divided over the
                // at most 2m - 1 pairs a DTW traversal sums.
                let budget = match params.metric {
                    Metric::Frechet => args.r / 2.0,
                    Metric::Dtw => args.r / (2.0 * (2 * m) as f64),
                };
                let eps = 0.99 * budget / (dim as f64).sqrt();
                let coords = p.coords().iter().map(|&x| x + rng.random_range(-eps..=eps)).collect();
                Curve::from_flat("q", dim, coords)?
            }
            BoundArg::Far => {
                let (_, far) = certified_distance(&params);
                walk(rng, "q", m, dim, step, 2.0 * far)?
            }
        };
        let ok = match bound {
            BoundArg::Near => distance(&p, &q, near_kind(&params))? < args.r,
            BoundArg::Far => {
                let (kind, far) = certified_distance(&params);
                distance(&p, &q, kind)? > far
            }
        };
        if ok {
            return Ok((p, q));
        }
    }
    Err(CliError::Unsatisfiable(format!("no suitable pair found in {MAX_PAIR_DRAWS} draws")))
}

#[allow(clippy::too_many_arguments)]
pub fn probe(
    args: &SchemeArgs,
    bound: BoundArg,
    p: Option<&str>,
    q: Option<&str>,
    m: usize,
    dim: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if trials < MIN_TRIALS {
        return Err(CliError::Input(format!("--trials must be at least {MIN_TRIALS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, q) = match (p, q) {
        (Some(p), Some(q)) => (parse_curve("p", p)?, parse_curve("q", q)?),
        _ => generate_pair(args, bound, m.max(1), dim, &mut rng)?,
    };
    if p.dim() != q.dim() {
        return Err(CliError::Input(format!("dimension mismatch: {} vs {}", p.dim(), q.dim())));
    }
    let params = plan_scheme(args, p.dim(), p.len().max(q.len()))?;
    let (kind, claim_value, claim) = match bound {
        BoundArg::Near => {
            let kind = near_kind(&params);
            let d = distance(&p, &q, kind)?;
            if d >= params.r {
                return Err(CliError::Input(format!(
                    "pair is not near: {kind:?} distance {d} is not below r = {}",
                    params.r
                )));
            }
            (kind, near_bound(&params, &p, &q)?, "near collision probability lower bound")
        }
        BoundArg::Far => {
            let (kind, far) = certified_distance(&params);
            let d = distance(&p, &q, kind)?;
            if d <= far {
                return Err(CliError::Input(format!("pair is not far: {kind:?} distance {d} does not exceed {far}")));
            }
            (kind, 0.0, "zero collisions beyond the certified distance")
        }
    };
    let est = estimate_collision_probability(&params, &p, &q, trials, &mut rng)?;
    let half_width = ((1.0 / CONFIDENCE_ALPHA).ln() / (2.0 * trials as f64)).sqrt();
    let (pass, rule) = match bound {
        BoundArg::Near => (est.rate() + half_width >= claim_value, "estimate + half_width >= bound"),
        BoundArg::Far => (est.collisions == 0, "estimate == 0"),
    };
    Ok(ProbeReport {
        scheme: SchemeDescriptor {
            name: params.scheme.name(),
            metric: match params.metric {
                Metric::Frechet => "frechet",
                Metric::Dtw => "dtw",
            },
            r: params.r,
            c: params.c,
            delta: params.delta,
            dim: params.dim,
            max_len: params.max_len,
        },
        pair: PairDescriptor {
            p: p.points().map(<[f64]>::to_vec).collect(),
            q: q.points().map(<[f64]>::to_vec).collect(),
            distance_kind: format!("{kind:?}"),
            distance: distance(&p, &q, kind)?,
        },
        claim,
        bound: claim_value,
        estimate: est.rate(),
        collisions: est.collisions,
        trials,
        half_width,
        rule,
        verdict: if pass { "pass" } else { "fail" },
    })
}
