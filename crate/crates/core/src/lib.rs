//! Densest k-subgraph sampling through a loop-augmented exclusion process.
//!
//! A configuration of `k` indistinguishable particles on a graph `L` is a
//! `k`-subset of its vertices, i.e. a vertex of the `k`-token graph of `L`.
//! The particle dynamics implemented in [`sampler`] is a random walk with `k`
//! extra loops per state on that token graph, whose stationary weight grows
//! with the token degree. Running it on the complement of a regular graph
//! therefore favours the densest `k`-subsets of the original graph.
//!
//! [`token_graph`] builds the state space explicitly for small instances and
//! [`analysis`] holds the mixing bounds and the exhaustive oracles used to
//! check the sampler.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod graph;
pub mod sampler;
pub mod subsets;
pub mod token_graph;

/// Library version recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Hypothesis, Result};
pub use graph::{Graph, InducedStats, StructureReport, VertexSubset};
pub use sampler::{Dynamics, SampleStatistics};
pub use token_graph::{StationaryDistribution, TokenGraph, TransitionMatrix};
