use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    InvalidVertex { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("expected {expected} colors, got {got}")]
    ColorCount { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is vertex-transitive")]
    VertexTransitive,
    #[error("vertex set {0:?} is not an orbit of the graph")]
    NotAnOrbit(Vec<Vertex>),
    #[error("terminal test disagrees across orbit members {0:?}")]
    InconsistentOrbit(Vec<Vertex>),
    #[error("too many orbits for subset enumeration ({0} > 20)")]
    TooManyOrbits(usize),
    #[error("brute-force orbit enumeration limited to 8 vertices, got {0}")]
    TooLarge(usize),
    #[error("derived subgraph has no terminal orbit")]
    NoTerminalInSubgraph,
    #[error("{0} is not a connected component of the second orbit")]
    NotAComponent(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("operand graph is empty")]
    EmptyOperand,
    #[error("component graphs must not be isomorphic")]
    IsomorphicComponents,
    #[error("component graph {0} is not vertex-transitive")]
    NotVertexTransitive(&'static str),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgoError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("view graph has no terminal orbit")]
    NoTerminalOrbit,
    #[error("view graph has a terminal orbit; the non-terminal algorithm does not apply")]
    HasTerminalOrbit,
    #[error("classification failed: {0}")]
    Classification(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error("placement must hold at least one robot")]
    EmptyPlacement,
    #[error("robot {robot} placed on invalid vertex {vertex}")]
    InvalidPlacement { robot: usize, vertex: Vertex },
    #[error("round {round}: robot {robot} tried to move {from} -> {to}, which is not an edge")]
    IllegalMove { round: usize, robot: usize, from: Vertex, to: Vertex },
    #[error("round {round}: robot {robot} moved {from} -> {to} after gathering")]
    UnstableFinal { round: usize, robot: usize, from: Vertex, to: Vertex },
    #[error("round {round}: decisions under two relabelings differ ({first:?} vs {second:?})")]
    NotEquivariant { round: usize, first: Option<Vertex>, second: Option<Vertex> },
    #[error("max_epochs must be at least 1")]
    ZeroEpochCap,
}
