//! Locality-sensitive hashing for polygonal curves.
//!
//! The crate provides exact distance kernels (discrete Fréchet, DTW, their
//! anchored and speed-constrained variants, and the 1D continuous Fréchet
//! distance), a family of grid-snapping hash schemes with zero false
//! positives, and a `(c, r)`-near-neighbor index built on top of them.

pub mod constrained;
pub mod curves;
pub mod error;
pub mod estimate;
pub mod grid;
pub mod index;
pub mod mix;
pub mod partition;
pub mod scheme;
pub mod signature;
pub mod workload;

pub use curves::{
    constrained_distance, continuous_frechet_1d, discrete_frechet, dtw, enumerate_traversals, Curve, DistanceKind,
    Traversal,
};
pub use error::{Error, Result};
