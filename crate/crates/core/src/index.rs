//! Near-neighbour index over any of the hash schemes.
//!
//! Every scheme here has no false positives beyond a fixed multiple of
//! `r` (see [`certified_distance`]), so a single
//! hash function per table suffices (`k = 1`) and the first stored curve
//! found in the query's bucket is an answer; no distance is computed at
//! query time. `L = ceil(1 / alpha1)` tables give constant success
//! probability, and `ceil(log2 n)` independent repetitions boost it to
//! `1 - 1/n`.
//!
//! Buckets are keyed by 64-bit key fingerprints. Distinct keys share a
//! fingerprint with probability about `2^-64` per comparison.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::{Curve, DistanceKind};
use crate::error::{Error, Result};
use crate::grid::{Metric, Scheme, SchemeParams};
use crate::mix::{derive_seed, WordHasher};
use crate::scheme::SchemeInstance;

/// Largest number of tables per repetition that [`NNIndex::build`] accepts.
pub const MAX_TABLES: u64 = 1 << 20;

const MAGIC: &[u8; 4] = b"CVHX";
const FORMAT_VERSION: u32 = 1;

const TAG_INSTANCE: u64 = 1;
const TAG_INPUT: u64 = 2;
const TAG_QUERY: u64 = 3;

/// `log2(1 / alpha1)`, where `alpha1` lower-bounds the collision
/// probability of near pairs. Length-dependent bounds use
/// `params.max_len`.
pub fn near_collision_log2_inverse(params: &SchemeParams) -> Result<f64> {
    let need_len = || {
        if params.max_len == 0 {
            Err(Error::InvalidParameter(format!("the {} scheme needs a curve-length bound", params.scheme.name())))
        } else {
            Ok(params.max_len as f64)
        }
    };
    let d = params.dim as f64;
    Ok(match params.scheme {
        Scheme::Basic | Scheme::Continuous1d => 1.0,
        // 2^{-2d(m1 + m2)} with both lengths at the bound.
        Scheme::Constant => 4.0 * d * need_len()?,
        Scheme::Tradeoff { blocks } => {
            let k = blocks as f64;
            2.0 * k + (k - 1.0) * need_len()?.log2()
        }
        Scheme::Anchored { width, ell } => 2.0 * need_len()? / ell as f64 * (2f64.sqrt() * width as f64).log2(),
        Scheme::Speed { width, ell } => 2.0 * need_len()? / ell as f64 * (2f64.sqrt() * (width * ell) as f64).log2(),
    })
}

/// The distance a collision certifies, and the bound it certifies.
///
/// Constrained schemes certify a relaxed constraint: anchored width
/// `w + 2(ell - 1)`, speed width `w * ell`. The constant scheme certifies
/// only `2 * c * r`: perturbation and snapping can each move a coordinate
/// by up to `delta / 2`.
pub fn certified_distance(params: &SchemeParams) -> (DistanceKind, f64) {
    let kind = match (params.scheme, params.metric) {
        (Scheme::Continuous1d, _) => DistanceKind::ContinuousFrechet1d,
        (Scheme::Anchored { width, ell }, Metric::Frechet) => DistanceKind::AnchoredFrechet(width + 2 * (ell - 1)),
        (Scheme::Anchored { width, ell }, Metric::Dtw) => DistanceKind::AnchoredDtw(width + 2 * (ell - 1)),
        (Scheme::Speed { width, ell }, Metric::Frechet) => DistanceKind::SpeedFrechet(width * ell),
        (Scheme::Speed { width, ell }, Metric::Dtw) => DistanceKind::SpeedDtw(width * ell),
        (_, Metric::Frechet) => DistanceKind::Frechet,
        (_, Metric::Dtw) => DistanceKind::Dtw,
    };
    let bound = match params.scheme {
        Scheme::Constant => 2.0 * params.far_radius(),
        _ => params.far_radius(),
    };
    (kind, bound)
}

/// Planned parameters of an index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConfig {
    pub params: SchemeParams,
    /// Lower bound on the collision probability of a near pair.
    pub alpha1: f64,
    /// Hash functions concatenated per table; always 1 here.
    pub k: u32,
    /// Tables per repetition, `ceil(1 / alpha1)` (saturating).
    pub tables: u64,
    /// Independent repetitions, `max(1, ceil(log2 n))`.
    pub reps: u32,
    pub seed: u64,
    pub n: u64,
}

impl IndexConfig {
    pub fn total_tables(&self) -> u64 {
        self.tables.saturating_mul(self.reps as u64)
    }
}

/// Plans `k`, `L` and the repetition count for `n` curves.
pub fn plan_index(params: &SchemeParams, n: u64, seed: u64) -> Result<IndexConfig> {
    let log2_inv = near_collision_log2_inverse(params)?;
    if log2_inv.is_nan() || log2_inv < 0.0 || log2_inv.is_infinite() {
        return Err(Error::InvalidParameter(format!("alpha1 = 2^-{log2_inv} is not a probability")));
    }
    let inv = log2_inv.exp2();
    // Absorb rounding so that e.g. 1 / (1/64) gives 64, not 65.
    let tables = if inv >= u64::MAX as f64 {
        u64::MAX
    } else if (inv - inv.round()).abs() <= 1e-9 * inv {
        inv.round() as u64
    } else {
        inv.ceil() as u64
    };
    let reps = if n <= 1 { 1 } else { (n as f64).log2().ceil() as u32 };
    Ok(IndexConfig { params: *params, alpha1: (-log2_inv).exp2(), k: 1, tables: tables.max(1), reps, seed, n })
}

/// Result of a query with probe statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOutcome {
    /// Position of the returned curve in the dataset.
    pub matched: Option<usize>,
    /// Tables probed.
    pub probes: u64,
    /// Bucket entries looked at.
    pub candidates: u64,
}

/// Hash-table index; immutable after construction.
#[derive(Debug)]
pub struct NNIndex {
    config: IndexConfig,
    curves: Vec<Curve>,
    instances: Vec<SchemeInstance>,
    tables: Vec<HashMap<u64, Vec<u32>>>,
}

fn instance_for(config: &IndexConfig, table: usize) -> Result<SchemeInstance> {
    SchemeInstance::from_seed(&config.params, derive_seed(config.seed, &[TAG_INSTANCE, table as u64]))
}

fn check_table_count(config: &IndexConfig) -> Result<()> {
    if config.tables > MAX_TABLES {
        return Err(Error::TooManyTables { tables: config.tables, limit: MAX_TABLES });
    }
    Ok(())
}

impl NNIndex {
    /// Hashes every curve into every table. Tables are filled in parallel;
    /// the result depends only on the dataset and the config.
    pub fn build(dataset: Vec<Curve>, config: IndexConfig) -> Result<Self> {
        check_table_count(&config)?;
        if let Some(c) = dataset.iter().find(|c| c.dim() != config.params.dim) {
            return Err(Error::DimensionMismatch { left: config.params.dim, right: c.dim() });
        }
        if dataset.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("at most 2^32 - 1 curves".into()));
        }
        let count = config.total_tables() as usize;
        let instances = (0..count).map(|t| instance_for(&config, t)).collect::<Result<Vec<_>>>()?;
        let tables = instances
            .par_iter()
            .enumerate()
            .map(|(t, instance)| {
                let mut table: HashMap<u64, Vec<u32>> = HashMap::new();
                for (i, curve) in dataset.iter().enumerate() {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[TAG_INPUT, t as u64, i as u64]));
                    let key = instance.hash_input(curve, &mut rng)?;
                    table.entry(key.fingerprint()).or_default().push(i as u32);
                }
                Ok(table)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NNIndex { config, curves: dataset, instances, tables })
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Total number of stored bucket entries.
    pub fn entries(&self) -> usize {
        self.tables.iter().flat_map(|t| t.values()).map(Vec::len).sum()
    }

    /// Returns a stored curve colliding with `q`, if any. Query-side
    /// randomness is derived from the index seed and the query's content.
    pub fn query(&self, q: &Curve) -> Result<Option<&Curve>> {
        let nonce = content_nonce(q);
        Ok(self.query_detailed(q, nonce)?.matched.map(|i| &self.curves[i]))
    }

    /// Like [`NNIndex::query`], with query-side randomness derived from
    /// `nonce`.
    pub fn query_with_nonce(&self, q: &Curve, nonce: u64) -> Result<Option<&Curve>> {
        Ok(self.query_detailed(q, nonce)?.matched.map(|i| &self.curves[i]))
    }

    /// Probes tables in order (repetitions, then tables) and stops at the
    /// first non-empty bucket.
    pub fn query_detailed(&self, q: &Curve, nonce: u64) -> Result<QueryOutcome> {
        if q.dim() != self.config.params.dim {
            return Err(Error::DimensionMismatch { left: self.config.params.dim, right: q.dim() });
        }
        let mut outcome = QueryOutcome { matched: None, probes: 0, candidates: 0 };
        for (t, (instance, table)) in self.instances.iter().zip(&self.tables).enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.config.seed, &[TAG_QUERY, t as u64, nonce]));
            let key = instance.hash_query(q, &mut rng)?;
            outcome.probes += 1;
            if let Some(&first) = table.get(&key.fingerprint()).and_then(|b| b.first()) {
                outcome.candidates += 1;
                outcome.matched = Some(first as usize);
                break;
            }
        }
        Ok(outcome)
    }

    /// Writes the index in the versioned little-endian binary format.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(FORMAT_VERSION)?;
        write_config(&mut w, &self.config)?;
        w.write_u64::<LE>(self.curves.len() as u64)?;
        for c in &self.curves {
            let id = c.id().as_bytes();
            w.write_u32::<LE>(id.len() as u32)?;
            w.write_all(id)?;
            w.write_u64::<LE>(c.len() as u64)?;
            for &x in c.coords() {
                w.write_f64::<LE>(x)?;
            }
        }
        w.write_u64::<LE>(self.tables.len() as u64)?;
        for table in &self.tables {
            let mut buckets: Vec<_> = table.iter().collect();
            buckets.sort_unstable_by_key(|(fp, _)| **fp);
            w.write_u64::<LE>(buckets.len() as u64)?;
            for (fp, ids) in buckets {
                w.write_u64::<LE>(*fp)?;
                w.write_u32::<LE>(ids.len() as u32)?;
                for &id in ids {
                    w.write_u32::<LE>(id)?;
                }
            }
        }
        Ok(())
    }

    /// Reads an index written by [`NNIndex::write_to`]; the scheme
    /// randomness is regenerated from the stored seed.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a curve index file".into()));
        }
        let version = r.read_u32::<LE>()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported index version {version}")));
        }
        let config = read_config(&mut r)?;
        check_table_count(&config)?;
        let dim = config.params.dim;
        let n = r.read_u64::<LE>()? as usize;
        let mut curves = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let id_len = r.read_u32::<LE>()? as usize;
            let mut id = vec![0u8; id_len];
            r.read_exact(&mut id)?;
            let id = String::from_utf8(id).map_err(|_| Error::Format("curve id is not UTF-8".into()))?;
            let m = r.read_u64::<LE>()? as usize;
            let mut coords = vec![0.0; m.checked_mul(dim).ok_or_else(|| Error::Format("curve too long".into()))?];
            r.read_f64_into::<LE>(&mut coords)?;
            curves.push(Curve::from_flat(id, dim, coords).map_err(|e| Error::Format(e.to_string()))?);
        }
        let count = r.read_u64::<LE>()?;
        if count != config.total_tables() {
            return Err(Error::Format(format!("expected {} tables, found {count}", config.total_tables())));
        }
        let mut tables = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let buckets = r.read_u64::<LE>()? as usize;
            let mut table = HashMap::with_capacity(buckets.min(n));
            for _ in 0..buckets {
                let fp = r.read_u64::<LE>()?;
                let len = r.read_u32::<LE>()? as usize;
                let mut ids = vec![0u32; len];
                r.read_u32_into::<LE>(&mut ids)?;
                if ids.iter().any(|&i| i as usize >= n) {
                    return Err(Error::Format("bucket refers to a missing curve".into()));
                }
                table.insert(fp, ids);
            }
            tables.push(table);
        }
        let instances = (0..count as usize).map(|t| instance_for(&config, t)).collect::<Result<Vec<_>>>()?;
        Ok(NNIndex { config, curves, instances, tables })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

/// Deterministic nonce from a curve's coordinates.
pub fn content_nonce(q: &Curve) -> u64 {
    let mut h = WordHasher::new(0xC0DE);
    h.write(q.dim() as u64);
    for &x in q.coords() {
        h.write_f64(x);
    }
    h.finish()
}

fn write_config<W: Write>(w: &mut W, c: &IndexConfig) -> Result<()> {
    let p = &c.params;
    let (a, b) = match p.scheme {
        Scheme::Basic | Scheme::Constant | Scheme::Continuous1d => (0, 0),
        Scheme::Tradeoff { blocks } => (blocks, 0),
        Scheme::Anchored { width, ell } | Scheme::Speed { width, ell } => (width, ell),
    };
    w.write_u8(p.scheme.code() as u8)?;
    w.write_u64::<LE>(a as u64)?;
    w.write_u64::<LE>(b as u64)?;
    w.write_u8(match p.metric {
        Metric::Frechet => 0,
        Metric::Dtw => 1,
    })?;
    w.write_f64::<LE>(p.r)?;
    w.write_f64::<LE>(p.c)?;
    w.write_f64::<LE>(p.delta)?;
    w.write_u64::<LE>(p.dim as u64)?;
    w.write_u64::<LE>(p.max_len as u64)?;
    w.write_f64::<LE>(c.alpha1)?;
    w.write_u32::<LE>(c.k)?;
    w.write_u64::<LE>(c.tables)?;
    w.write_u32::<LE>(c.reps)?;
    w.write_u64::<LE>(c.seed)?;
    w.write_u64::<LE>(c.n)?;
    Ok(())
}

fn read_config<R: Read>(r: &mut R) -> Result<IndexConfig> {
    let code = r.read_u8()?;
    let a = r.read_u64::<LE>()? as usize;
    let b = r.read_u64::<LE>()? as usize;
    let scheme = match code {
        1 => Scheme::Basic,
        2 => Scheme::Constant,
        3 => Scheme::Tradeoff { blocks: a },
        4 => Scheme::Anchored { width: a, ell: b },
        5 => Scheme::Speed { width: a, ell: b },
        6 => Scheme::Continuous1d,
        other => return Err(Error::Format(format!("unknown scheme code {other}"))),
    };
    let metric = match r.read_u8()? {
        0 => Metric::Frechet,
        1 => Metric::Dtw,
        other => return Err(Error::Format(format!("unknown metric code {other}"))),
    };
    let params = SchemeParams {
        scheme,
        metric,
        r: r.read_f64::<LE>()?,
        c: r.read_f64::<LE>()?,
        delta: r.read_f64::<LE>()?,
        dim: r.read_u64::<LE>()? as usize,
        max_len: r.read_u64::<LE>()? as usize,
    };
    Ok(IndexConfig {
        params,
        alpha1: r.read_f64::<LE>()?,
        k: r.read_u32::<LE>()?,
        tables: r.read_u64::<LE>()?,
        reps: r.read_u32::<LE>()?,
        seed: r.read_u64::<LE>()?,
        n: r.read_u64::<LE>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constrained::{plan_anchored, plan_speed};
    use crate::curves::constrained_distance;
    use crate::grid::{plan_basic, plan_constant};
    use crate::partition::plan_tradeoff;
    use rand::Rng;

    #[test]
    fn planning_examples() {
        let basic = plan_basic(1.0, 1, 3).unwrap();
        let c = plan_index(&basic, 1024, 0).unwrap();
        assert_eq!((c.k, c.tables, c.reps), (1, 2, 10));
        assert_eq!(c.alpha1, 0.5);
        assert_eq!(plan_index(&basic, 1, 0).unwrap().reps, 1);
        assert_eq!(plan_index(&basic, 1000, 0).unwrap().reps, 10);
        let t = plan_tradeoff(1.0, 1, 4, 2).unwrap();
        let c = plan_index(&t, 10, 0).unwrap();
        assert_eq!(c.tables, 64);
        assert!((c.alpha1 - 1.0 / 64.0).abs() < 1e-15);
        let k = plan_constant(1.0, 1).unwrap().with_max_len(2);
        assert_eq!(plan_index(&k, 10, 0).unwrap().tables, 256);
        assert!(plan_index(&plan_constant(1.0, 1).unwrap(), 10, 0).is_err());
        // (1 / (2 sqrt 2))^{2 * 4 / 2}
        let a = plan_anchored(1.0, 1, 2, 2).unwrap().with_max_len(4);
        assert_eq!(plan_index(&a, 10, 0).unwrap().tables, 64);
        let s = plan_speed(1.0, 1, 1, 2).unwrap().with_max_len(2);
        assert_eq!(plan_index(&s, 10, 0).unwrap().tables, 8);
    }

    #[test]
    fn refuses_huge_table_counts() {
        let k = plan_constant(1.0, 2).unwrap().with_max_len(8);
        let config = plan_index(&k, 10, 0).unwrap();
        assert!(config.tables > MAX_TABLES);
        assert!(matches!(NNIndex::build(vec![], config), Err(Error::TooManyTables { .. })));
    }

    fn random_curves(n: usize, m: usize, d: usize, seed: u64) -> Vec<Curve> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let pts = (0..m).map(|_| (0..d).map(|_| rng.random_range(-50.0..50.0)).collect()).collect();
                Curve::new(format!("c{i}"), pts).unwrap()
            })
            .collect()
    }

    #[test]
    fn stored_curves_find_themselves() {
        let data = random_curves(50, 5, 2, 1);
        let config = plan_index(&plan_basic(0.1, 2, 5).unwrap(), 50, 9).unwrap();
        let index = NNIndex::build(data.clone(), config).unwrap();
        assert_eq!(index.entries(), 50 * config.total_tables() as usize);
        for c in &data {
            assert_eq!(index.query(c).unwrap().unwrap().id(), c.id());
        }
    }

    #[test]
    fn single_curve_and_empty_index() {
        let config = plan_index(&plan_basic(1.0, 2, 5).unwrap(), 1, 3).unwrap();
        let data = random_curves(1, 5, 2, 2);
        let index = NNIndex::build(data.clone(), config).unwrap();
        assert_eq!(index.entries(), config.total_tables() as usize);
        let empty = NNIndex::build(vec![], config).unwrap();
        assert!(empty.is_empty());
        assert!(empty.query(&data[0]).unwrap().is_none());
    }

    #[test]
    fn far_queries_inspect_nothing() {
        let data = random_curves(30, 4, 1, 4);
        let params = plan_basic(0.01, 1, 4).unwrap();
        let index = NNIndex::build(data, plan_index(&params, 30, 5).unwrap()).unwrap();
        let q = Curve::from_values("q", &[1e6, 1e6, 1e6, 1e6]).unwrap();
        let out = index.query_detailed(&q, 0).unwrap();
        assert_eq!(out.matched, None);
        assert_eq!(out.candidates, 0);
        assert_eq!(out.probes, index.config().total_tables());
    }

    #[test]
    fn answers_are_sound_for_asymmetric_schemes() {
        let data = random_curves(60, 6, 1, 6);
        for params in [
            plan_constant(4.0, 1).unwrap().with_max_len(3),
            plan_tradeoff(2.0, 1, 6, 3).unwrap(),
            plan_anchored(3.0, 1, 2, 2).unwrap().with_max_len(6),
            plan_speed(3.0, 1, 1, 2).unwrap().with_max_len(6),
        ] {
            let index = NNIndex::build(data.clone(), plan_index(&params, 60, 7).unwrap()).unwrap();
            let (kind, bound) = certified_distance(&params);
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            for (nonce, q) in random_curves(40, 6, 1, 9).iter().enumerate() {
                let q = Curve::from_flat("q", 1, q.coords().iter().map(|x| x * rng.random_range(0.0..1.0)).collect())
                    .unwrap();
                if let Some(hit) = index.query_with_nonce(&q, nonce as u64).unwrap() {
                    assert!(constrained_distance(hit, &q, kind).unwrap() <= bound + 1e-9);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_determinism() {
        let data = random_curves(40, 5, 2, 10);
        let params = plan_tradeoff(0.5, 2, 5, 2).unwrap();
        let config = plan_index(&params, 40, 11).unwrap();
        let a = NNIndex::build(data.clone(), config).unwrap();
        let b = NNIndex::build(data.clone(), config).unwrap();
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        a.write_to(&mut ba).unwrap();
        b.write_to(&mut bb).unwrap();
        assert_eq!(ba, bb);
        let c = NNIndex::read_from(&ba[..]).unwrap();
        assert_eq!(c.config(), a.config());
        assert_eq!(c.curves(), a.curves());
        for (nonce, q) in data.iter().enumerate() {
            assert_eq!(a.query_detailed(q, nonce as u64).unwrap(), c.query_detailed(q, nonce as u64).unwrap());
        }
        assert!(matches!(NNIndex::read_from(&b"XXXX"[..]), Err(Error::Format(_))));
        assert!(NNIndex::read_from(&ba[..ba.len() - 3]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let config = plan_index(&plan_basic(1.0, 2, 5).unwrap(), 1, 3).unwrap();
        assert!(NNIndex::build(random_curves(2, 3, 1, 0), config).is_err());
        let index = NNIndex::build(random_curves(2, 3, 2, 0), config).unwrap();
        assert!(index.query(&random_curves(1, 3, 3, 0)[0]).is_err());
    }
}
