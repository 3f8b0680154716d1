//! Numerical laboratory for the boundary dynamics of multiply connected
//! Fatou components.
//!
//! The crate is organised around the explicit examples that make the theory
//! computable at desk scale:
//!
//! * [`map_zoo`]: the catalogue of holomorphic maps (Baker's map on ℂ*, its
//!   sine-map lift, power maps, Möbius maps, finite Blaschke products, Keen's
//!   and McMullen's families), orbits and a bracketing root finder.
//! * [`covering`]: closed-form universal coverings of round annuli, the
//!   punctured disk and the disk, their deck generators, lifts of model maps
//!   and the escaping / bounded / bungee radial classifier.
//! * [`blaschke`]: the infinite Blaschke product associated with Baker's
//!   basin, with certified truncation.
//! * [`harmonic`]: Walk-on-Spheres estimation of harmonic measure.
//! * [`circle`]: iteration and ergodic statistics of boundary maps.
//! * [`render`]: grid classification of dynamical planes and PPM output.

// Checks such as `!(x > 0.0)` are written negated on purpose: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod circle;
pub mod covering;
pub mod harmonic;
pub mod histogram;
pub mod map_zoo;
pub mod mobius;
pub mod render;
pub mod rng;
pub mod stats;

pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

pub use blaschke::{BlaschkeError, BlaschkeProduct, TauSolution};
pub use circle::{CircleError, CircleMap, SpreadReport};
pub use covering::{CoveringError, CoveringModel, RadialClass, RadialThresholds, Verdict};
pub use harmonic::{DomainOracle, HarmonicError, WalkResult};
pub use histogram::ArcHistogram;
pub use map_zoo::{ExtPoint, MapError, MapKind, MapSpec, Orbit, OrbitEnd};
pub use mobius::Mobius;
pub use render::{ClassifiedGrid, GridSpec, PixelVerdict, RenderError};
