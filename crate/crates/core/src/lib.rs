//! Gathering of oblivious robots on graphs under a round-robin scheduler.
//!
//! The crate is layered bottom-up: [`graph`] holds the representation and
//! combinatorial queries, [`canon`] computes canonical labelings and orbits,
//! [`analysis`] finds terminal orbits, [`generators`] builds the graph
//! families, [`algos`] implements the two gathering algorithms, and [`sim`]
//! runs them.

pub mod algos;
pub mod analysis;
pub mod canon;
pub mod error;
pub mod generators;
pub mod graph;
pub mod sim;

pub use error::{AlgoError, AnalysisError, GenerateError, GraphError, SimError};
pub use graph::{Graph, Path, Vertex, VertexSet};
