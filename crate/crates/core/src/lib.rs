//! Simulation and verification toolkit for averaging dynamics on dynamic
//! directed networks.
//!
//! A system of `n` processes holds vectors in `R^d` and repeatedly replaces
//! them by convex combinations of the vectors received over a per-round
//! communication graph. The graph is drawn each round by an oblivious
//! adversary from a fixed family. This crate provides:
//!
//! * [`graph`]: communication graphs, the product (relay) composition, and
//!   the rootedness / broadcastability predicates with witness extraction;
//! * [`adversary`]: round schedulers over graph families, seeded random
//!   graph constructions, and the isolated-source counterexample graph;
//! * [`dynamics`]: weight rules, the averaging step, execution traces, and
//!   the convex decomposition of a step against a broadcasting set;
//! * [`geometry`]: hull volumes, half-space distances, orthogonal
//!   projections, thickness, and the rotational segment-volume bounds;
//! * [`analysis`]: trace verifiers that turn the contraction and
//!   solvability claims into per-round pass/fail reports.
//!
//! All numeric code is generic over the scalar type through the [`Real`]
//! trait (`f32` or `f64`); concrete `f64` aliases are exported at the crate
//! root. Every random choice is driven by an explicit seed, and identical
//! seeds reproduce identical executions bit for bit.
//!
//! Process indices are `0`-based everywhere, including file formats.

pub mod adversary;
pub mod analysis;
pub mod dynamics;
pub mod geometry;
pub mod graph;

mod error;
mod scalar;

pub use error::Error;
pub use scalar::Real;

/// Convenience result type used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// State vector over `f64`, the scalar type used by the CLI.
pub type StateVector64 = dynamics::StateVector<f64>;
/// Weight matrix over `f64`.
pub type WeightMatrix64 = dynamics::WeightMatrix<f64>;
/// Weight rule over `f64`.
pub type WeightRule64 = dynamics::WeightRule<f64>;
/// Execution trace over `f64`.
pub type ExecutionTrace64 = dynamics::ExecutionTrace<f64>;
/// Orthogonal projection over `f64`.
pub type OrthoProjection64 = geometry::OrthoProjection<f64>;
