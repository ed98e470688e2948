//! Route planning for fleets that revisit weighted points of interest.
//!
//! A fixed number of open routes (free start and end, no depot legs) must be
//! chosen so that the total reward `Σ wᵢ·qᵢ^β` is maximized, where `qᵢ` is the
//! number of distinct routes visiting POI `i` and `β ∈ (0,1)` makes repeat
//! visits pay off with diminishing returns. Each route is limited by a travel
//! budget and may not visit the same POI twice.
//!
//! - [`model`] — domain types, reward evaluation, feasibility checking.
//! - [`graph`] — travel-matrix builders (Euclidean, edge lists, metric
//!   closure) and the arc-to-node reward augmentation.
//! - [`construct`] — greedy and stochastic-orienteering constructive solvers.
//! - [`alns`] — adaptive large neighborhood search with destroy/repair
//!   operators, roulette adaptation, and simulated-annealing acceptance.
//! - [`exact`] — brute-force optimal solver for small instances.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for float math.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("otop-core needs either the `std` or the `libm` feature");

pub mod alns;
pub mod construct;
pub mod exact;
pub mod graph;
mod math;
pub mod model;
pub mod rng;
