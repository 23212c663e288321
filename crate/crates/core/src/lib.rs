//! Set Cover by Pairs and its two shortest-path specializations,
//! Setwise-Disjoint and Pathwise-Disjoint Facility Location.
//!
//! The pipeline is: load or generate a [`graph::Network`], derive the cover
//! relation with [`triples`], then solve the resulting [`scp::ScpInstance`]
//! with a heuristic ([`scp`], [`genetic`], [`hitting`]) or exactly
//! ([`exact`]), and bound it from below ([`hitting`], [`special`]).
//! [`solve`] dispatches the algorithms by name and [`report`] serializes
//! and tabulates results.

pub mod exact;
pub mod generate;
pub mod genetic;
pub mod graph;
pub mod hitting;
pub mod rng;
pub mod scp;
pub mod report;
pub mod solve;
pub mod special;
pub mod triples;

pub use graph::{Arc, Network, NetworkError, Vertex};
pub use triples::{CoverMode, Disjointness, Triple, TripleSet};
