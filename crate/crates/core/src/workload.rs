//! Synthetic planted near-neighbor instances.
//!
//! A planted instance has one query curve, exactly one dataset curve within
//! the near radius of it and every other curve verified by exact dynamic
//! programming to lie beyond the far radius.

use rand::Rng;

use crate::curves::{discrete_frechet, Curve};
use crate::error::{Error, Result};

/// Default cap on rejected far-curve draws.
pub const MAX_REJECTIONS: u64 = 1_000_000;

/// Shape of a planted instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    /// The planted curve satisfies `dF(planted, query) < planted_r`.
    pub planted_r: f64,
    /// Every other curve satisfies `dF(curve, query) > far_cr`.
    pub far_cr: f64,
    /// Side length of the box `[0, spread)^d` vertices are drawn from.
    pub spread: f64,
    pub max_rejections: u64,
}

impl PlantedConfig {
    /// Vertices spread over a box of side `8 * far_cr`.
    pub fn new(n: usize, m: usize, dim: usize, planted_r: f64, far_cr: f64) -> Self {
        PlantedConfig { n, m, dim, planted_r, far_cr, spread: 8.0 * far_cr, max_rejections: MAX_REJECTIONS }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.dim == 0 {
            return Err(Error::InvalidParameter("n, m and d must be >= 1".into()));
        }
        if !(self.planted_r > 0.0 && self.planted_r.is_finite()) {
            return Err(Error::InvalidParameter(format!("planted radius must be positive, got {}", self.planted_r)));
        }
        if !(self.far_cr > self.planted_r && self.far_cr.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "far radius {} must exceed planted radius {}",
                self.far_cr, self.planted_r
            )));
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidParameter(format!("spread must be positive, got {}", self.spread)));
        }
        Ok(())
    }
}

/// A generated instance. Dataset ids are `c0, c1, ...`; the query id is `q`.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub dataset: Vec<Curve>,
    pub query: Curve,
    /// Position of the planted curve in `dataset`.
    pub planted: usize,
    /// Far-curve draws that failed verification.
    pub rejections: u64,
}

impl PlantedInstance {
    pub fn planted_id(&self) -> &str {
        self.dataset[self.planted].id()
    }
}

fn random_curve<R: Rng + ?Sized>(id: String, m: usize, dim: usize, spread: f64, rng: &mut R) -> Result<Curve> {
    let coords = (0..m * dim).map(|_| rng.random_range(0.0..spread)).collect();
    Curve::from_flat(id, dim, coords)
}

/// Generates a planted instance.
///
/// The planted curve moves every coordinate of the query by less than
/// `planted_r / (2 sqrt(d))`, so each paired vertex is closer than
/// `planted_r / 2`. Far curves are drawn uniformly from the box and redrawn
/// until `dF > far_cr`.
pub fn generate_planted<R: Rng + ?Sized>(config: &PlantedConfig, rng: &mut R) -> Result<PlantedInstance> {
    config.validate()?;
    let PlantedConfig { n, m, dim, .. } = *config;
    let query = random_curve("q".into(), m, dim, config.spread, rng)?;
    let planted = rng.random_range(0..n);
    let step = config.planted_r / (2.0 * (dim as f64).sqrt());
    let mut dataset = Vec::with_capacity(n);
    let mut rejections = 0;
    for i in 0..n {
        let id = format!("c{i}");
        if i == planted {
            let coords = query.coords().iter().map(|&x| x + rng.random_range(-step..step)).collect();
            dataset.push(Curve::from_flat(id, dim, coords)?);
            continue;
        }
        loop {
            let c = random_curve(id.clone(), m, dim, config.spread, rng)?;
            if discrete_frechet(&c, &query)? > config.far_cr {
                dataset.push(c);
                break;
            }
            rejections += 1;
            if rejections >= config.max_rejections {
                return Err(Error::Unsatisfiable(format!(
                    "{rejections} far curves rejected; no curve in the box lies beyond {}",
                    config.far_cr
                )));
            }
        }
    }
    Ok(PlantedInstance { dataset, query, planted, rejections })
}
