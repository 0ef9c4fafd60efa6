//! One sampled member of a hash family.
//!
//! A [`SchemeInstance`] holds the randomness shared between input and query
//! hashing (the grid shifts). Private randomness (perturbations, sampled
//! partitions, cut noise) is drawn from the generator passed to
//! [`SchemeInstance::hash_input`] and [`SchemeInstance::hash_query`].
//!
//! Shifts are derived from a per-instance seed by position, so a scheme
//! that needs more blocks for a longer curve sees the same leading shifts.

use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constrained::{anchored_noise_len, constrained_hash, ArrayKey, CutNoise};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::grid::{
    constant_hash, sample_perturbation, sample_shift, snap_to_grid, GridShift, LatticeKey, Scheme, SchemeParams,
};
use crate::mix::{derive_seed, WordHasher};
use crate::partition::{query_partition, sample_partition, tradeoff_hash};
use crate::signature::continuous_hash;

/// A hash value from any scheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Key {
    Flat(LatticeKey),
    Array(ArrayKey),
}

impl Key {
    /// 64-bit digest of the key's full integer content, block boundaries and
    /// scheme id. Equal keys always agree; distinct keys agree with
    /// probability about `2^-64`.
    pub fn fingerprint(&self) -> u64 {
        let mut h = WordHasher::new(0xF1A6);
        let flat = |h: &mut WordHasher, k: &LatticeKey| {
            h.write(k.dim() as u64).write(k.cells().len() as u64);
            for &c in k.cells() {
                h.write_i64(c);
            }
        };
        match self {
            Key::Flat(k) => {
                h.write(1).write(k.scheme_id());
                flat(&mut h, k);
            }
            Key::Array(a) => {
                h.write(2).write(a.scheme_id()).write(a.blocks().len() as u64);
                for k in a.blocks() {
                    flat(&mut h, k);
                }
            }
        }
        h.finish()
    }
}

/// Shared randomness of one hash function pair.
#[derive(Debug, Clone)]
pub struct SchemeInstance {
    params: SchemeParams,
    seed: u64,
    shifts: Vec<GridShift>,
}

impl SchemeInstance {
    /// Draws a fresh instance.
    pub fn sample<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Result<Self> {
        Self::from_seed(params, rng.random())
    }

    /// Rebuilds the instance determined by `seed`.
    pub fn from_seed(params: &SchemeParams, seed: u64) -> Result<Self> {
        validate(params)?;
        let count = match params.scheme {
            Scheme::Constant => 0,
            Scheme::Basic | Scheme::Continuous1d => 1,
            Scheme::Tradeoff { blocks } => blocks,
            Scheme::Anchored { ell, .. } => params.max_len.div_ceil(ell).max(1),
            Scheme::Speed { .. } => params.max_len.max(1),
        };
        let mut instance = SchemeInstance { params: *params, seed, shifts: Vec::new() };
        instance.shifts = (0..count).map(|i| instance.shift_at(i)).collect();
        Ok(instance)
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The shift for block `i`.
    pub fn shift_at(&self, i: usize) -> GridShift {
        if let Some(s) = self.shifts.get(i) {
            return s.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &[i as u64]));
        sample_shift(self.params.delta, self.params.dim, &mut rng)
    }

    fn shifts(&self, count: usize) -> Cow<'_, [GridShift]> {
        if count <= self.shifts.len() {
            Cow::Borrowed(&self.shifts[..count])
        } else {
            Cow::Owned((0..count).map(|i| self.shift_at(i)).collect())
        }
    }

    fn check_curve(&self, p: &Curve) -> Result<()> {
        if p.dim() != self.params.dim {
            return Err(Error::DimensionMismatch { left: self.params.dim, right: p.dim() });
        }
        Ok(())
    }

    /// Hashes a stored curve; `rng` supplies the input side's private
    /// randomness.
    pub fn hash_input<R: Rng + ?Sized>(&self, p: &Curve, rng: &mut R) -> Result<Key> {
        self.hash(p, rng, true)
    }

    /// Hashes a query curve; `rng` supplies the query side's private
    /// randomness.
    pub fn hash_query<R: Rng + ?Sized>(&self, q: &Curve, rng: &mut R) -> Result<Key> {
        self.hash(q, rng, false)
    }

    fn hash<R: Rng + ?Sized>(&self, p: &Curve, rng: &mut R, input: bool) -> Result<Key> {
        self.check_curve(p)?;
        let params = &self.params;
        let m = p.len();
        Ok(match params.scheme {
            Scheme::Basic => Key::Flat(snap_to_grid(p, &self.shifts[0])?),
            Scheme::Continuous1d => Key::Flat(continuous_hash(p, params, &self.shifts[0])?),
            Scheme::Constant => {
                let pert = sample_perturbation(params.delta, m, params.dim, rng);
                Key::Flat(constant_hash(p, params, &pert)?)
            }
            Scheme::Tradeoff { blocks } => {
                let part = if input { sample_partition(m, blocks, rng) } else { query_partition(m, blocks) };
                Key::Flat(tradeoff_hash(p, params, &self.shifts, &part)?)
            }
            Scheme::Anchored { width, ell } => {
                let noise = CutNoise::sample_anchored(width, anchored_noise_len(m, ell), rng);
                let shifts = self.shifts(m.div_ceil(ell));
                Key::Array(constrained_hash(p, params, &shifts, &noise)?)
            }
            Scheme::Speed { width, ell } => {
                let noise = CutNoise::sample_speed(width, ell, m, rng);
                let shifts = self.shifts(m);
                Key::Array(constrained_hash(p, params, &shifts, &noise)?)
            }
        })
    }
}

fn validate(params: &SchemeParams) -> Result<()> {
    if !(params.delta > 0.0 && params.delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {}", params.delta)));
    }
    if params.dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    match params.scheme {
        Scheme::Continuous1d if params.dim != 1 => {
            Err(Error::InvalidParameter("the continuous scheme is defined for d = 1 only".into()))
        }
        Scheme::Tradeoff { blocks: 0 } => Err(Error::InvalidParameter("K must be >= 1".into())),
        Scheme::Anchored { width, ell } if width < 2 || width % 2 != 0 || ell == 0 => {
            Err(Error::InvalidParameter(format!("anchored needs even w >= 2 and ell >= 1, got {width}, {ell}")))
        }
        Scheme::Speed { width, ell } if width == 0 || ell == 0 => {
            Err(Error::InvalidParameter("speed needs w >= 1 and ell >= 1".into()))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constrained::{plan_anchored, plan_speed};
    use crate::grid::{plan_basic, plan_constant};
    use crate::partition::plan_tradeoff;
    use crate::signature::plan_continuous;

    fn all_params() -> Vec<SchemeParams> {
        vec![
            plan_basic(0.5, 2, 6).unwrap(),
            plan_constant(0.5, 2).unwrap().with_max_len(6),
            plan_tradeoff(0.5, 2, 6, 3).unwrap(),
            plan_anchored(0.5, 2, 2, 2).unwrap().with_max_len(6),
            plan_speed(0.5, 2, 2, 2).unwrap().with_max_len(6),
        ]
    }

    fn curve(m: usize, d: usize, scale: f64) -> Curve {
        Curve::new("c", (0..m).map(|i| (0..d).map(|k| scale * (i * (k + 2)) as f64).collect()).collect()).unwrap()
    }

    #[test]
    fn seeds_reproduce_instances() {
        for params in all_params() {
            let a = SchemeInstance::from_seed(&params, 17).unwrap();
            let b = SchemeInstance::from_seed(&params, 17).unwrap();
            let p = curve(6, 2, 0.3);
            let mut r1 = ChaCha8Rng::seed_from_u64(3);
            let mut r2 = ChaCha8Rng::seed_from_u64(3);
            assert_eq!(a.hash_input(&p, &mut r1).unwrap(), b.hash_input(&p, &mut r2).unwrap());
            assert_eq!(a.shift_at(9), b.shift_at(9));
        }
    }

    #[test]
    fn symmetric_schemes_match_themselves() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = plan_basic(0.5, 2, 6).unwrap();
        let inst = SchemeInstance::sample(&params, &mut rng).unwrap();
        let p = curve(6, 2, 0.3);
        assert_eq!(inst.hash_input(&p, &mut rng).unwrap(), inst.hash_query(&p, &mut rng).unwrap());
        let params = plan_continuous(0.5, 6).unwrap();
        let inst = SchemeInstance::sample(&params, &mut rng).unwrap();
        let p = curve(6, 1, 0.3);
        assert_eq!(inst.hash_input(&p, &mut rng).unwrap(), inst.hash_query(&p, &mut rng).unwrap());
    }

    #[test]
    fn longer_curves_extend_the_shift_sequence() {
        let params = plan_speed(0.5, 1, 1, 1).unwrap().with_max_len(2);
        let inst = SchemeInstance::from_seed(&params, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = curve(9, 1, 1.0);
        let Key::Array(k) = inst.hash_input(&p, &mut rng).unwrap() else { panic!() };
        // w = ell = 1 puts every vertex in its own block.
        assert_eq!(k.blocks().len(), 9);
    }

    #[test]
    fn fingerprints_follow_key_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for params in all_params() {
            let inst = SchemeInstance::sample(&params, &mut rng).unwrap();
            let mut keys = Vec::new();
            for m in 1..6 {
                for s in [0.0, 0.01, 0.2, 1.0, 3.0] {
                    keys.push(inst.hash_input(&curve(m, 2, s), &mut rng).unwrap());
                    keys.push(inst.hash_query(&curve(m, 2, s), &mut rng).unwrap());
                }
            }
            for a in &keys {
                for b in &keys {
                    assert_eq!(a == b, a.fingerprint() == b.fingerprint());
                }
            }
        }
    }

    #[test]
    fn rebracketed_array_keys_have_distinct_fingerprints() {
        let k = |cells: Vec<i64>| LatticeKey::from_parts(1, 1, cells);
        let a = Key::Array(ArrayKey::new(1, vec![k(vec![1, 2]), k(vec![3])]));
        let b = Key::Array(ArrayKey::new(1, vec![k(vec![1]), k(vec![2, 3])]));
        assert_ne!(a, b);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(Key::Flat(k(vec![1, 2, 3])).fingerprint(), a.fingerprint());
    }

    #[test]
    fn rejects_bad_params_and_dimensions() {
        let mut params = plan_basic(1.0, 2, 3).unwrap();
        let inst = SchemeInstance::from_seed(&params, 0).unwrap();
        assert!(inst.hash_input(&curve(3, 1, 1.0), &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        params.delta = 0.0;
        assert!(SchemeInstance::from_seed(&params, 0).is_err());
        let mut cont = plan_continuous(1.0, 3).unwrap();
        cont.dim = 2;
        assert!(SchemeInstance::from_seed(&cont, 0).is_err());
    }
}
