//! Fixed-point iterations of alpha-firmly nonexpansive mappings on
//! p-uniformly convex geodesic spaces.
//!
//! The crate is organized around six pieces:
//!
//! * [`spaces`] — concrete model spaces (Euclidean, Poincaré disk,
//!   spherical cap, star tree) with exact geodesics and certified
//!   convexity constants;
//! * [`quantities`] — the regularity functionals psi and Delta, firmness
//!   certificates, and the surrogate residual map;
//! * [`operators`] — projectors, p-proximal mappings with Moreau–Yosida
//!   envelopes, Krasnoselskii–Mann relaxations, compositions and
//!   p-convex combinations through barycenters;
//! * [`algorithms`] — iteration drivers with full trace capture
//!   (cyclic projections, proximal splitting, metric projected gradients);
//! * [`analysis`] — gauge fitting from traces, the rho/theta transform,
//!   rate envelopes and convergence certification;
//! * [`config`] — the batch experiment harness behind the `geofirm` binary.
//!
//! Run `cargo run --example <name>` for worked tours of each capability,
//! and see the `acceptance` integration test for the full property suite.

pub mod algorithms;
pub mod analysis;
pub mod config;
pub mod error;
pub mod operators;
pub mod quantities;
pub mod spaces;

pub use error::{Error, Result};
pub use spaces::{ModelSpace, Point, Region, Segment, SpaceParams};
