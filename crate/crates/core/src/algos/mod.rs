//! The two gathering algorithms as pure view-to-move functions.

mod nonterminal;
mod terminal;
pub mod transitions;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canon::{canonical_form, canonize};
use crate::error::{AlgoError, AnalysisError};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::sim::View;

pub use nonterminal::{context_of, Layout, NonTerminal, NotTContext, Trickle};
pub use terminal::Terminal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskId {
    AtT1,
    AtT2,
    AtT3,
    T1,
    T2i,
    T2ii,
    T2iii,
    T2iv,
    T3i,
    T3ii,
    T3iii,
    T4,
    Final,
}

impl TaskId {
    pub const ALL: [TaskId; 13] = [
        TaskId::AtT1,
        TaskId::AtT2,
        TaskId::AtT3,
        TaskId::T1,
        TaskId::T2i,
        TaskId::T2ii,
        TaskId::T2iii,
        TaskId::T2iv,
        TaskId::T3i,
        TaskId::T3ii,
        TaskId::T3iii,
        TaskId::T4,
        TaskId::Final,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TaskId::AtT1 => "AT.T1",
            TaskId::AtT2 => "AT.T2",
            TaskId::AtT3 => "AT.T3",
            TaskId::T1 => "T1",
            TaskId::T2i => "T2.i",
            TaskId::T2ii => "T2.ii",
            TaskId::T2iii => "T2.iii",
            TaskId::T2iv => "T2.iv",
            TaskId::T3i => "T3.i",
            TaskId::T3ii => "T3.ii",
            TaskId::T3iii => "T3.iii",
            TaskId::T4 => "T4",
            TaskId::Final => "FINAL",
        }
    }

    /// Tasks during which a multiplicity is emptied one robot at a time.
    pub fn is_trickle(self) -> bool {
        matches!(self, TaskId::T2iv | TaskId::T3ii | TaskId::T3iii)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TaskId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskId::ALL.into_iter().find(|t| t.label() == s).ok_or_else(|| format!("unknown task label {s:?}"))
    }
}

impl Serialize for TaskId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for TaskId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A gathering algorithm. `classify` sees the configuration from outside
/// (used to label traces); `decide` sees only a robot's view and returns
/// the neighbor to move to, or `None` for a nil move.
pub trait Algorithm: Send + Sync {
    fn name(&self) -> &'static str;

    fn classify(&self, g: &Graph, occupied: &VertexSet) -> Result<TaskId, AlgoError>;

    fn decide(&self, view: &View) -> Result<Option<Vertex>, AlgoError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoChoice {
    Auto,
    Terminal,
    Nonterminal,
}

impl FromStr for AlgoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(AlgoChoice::Auto),
            "terminal" => Ok(AlgoChoice::Terminal),
            "nonterminal" => Ok(AlgoChoice::Nonterminal),
            other => Err(format!("unknown algorithm {other:?} (expected auto, terminal, nonterminal)")),
        }
    }
}

/// Resolves `choice` against `g`: `Auto` picks the terminal-orbit algorithm
/// iff `g` has a terminal orbit.
pub fn select(g: &Graph, choice: AlgoChoice) -> Result<Box<dyn Algorithm>, AlgoError> {
    let orbits = canonize(g).orbits;
    let has_terminal = crate::analysis::smallest_terminal_index(g, &orbits)?.is_some();
    match (choice, has_terminal) {
        (AlgoChoice::Auto, true) | (AlgoChoice::Terminal, true) => Ok(Box::new(Terminal)),
        (AlgoChoice::Auto, false) | (AlgoChoice::Nonterminal, false) => Ok(Box::new(NonTerminal)),
        (AlgoChoice::Terminal, false) => Err(AlgoError::NoTerminalOrbit),
        (AlgoChoice::Nonterminal, true) => Err(AlgoError::HasTerminalOrbit),
    }
}

/// Canonical labels of `g` colored by each vertex's base color and its
/// state (empty, occupied, own position). Every tie among vertices is broken
/// by this ranking so decisions do not depend on the view's vertex ids.
pub fn state_rank(g: &Graph, occupied: &VertexSet, own: Option<Vertex>) -> Vec<usize> {
    let colors = (0..g.n())
        .map(|v| {
            let state = if Some(v) == own {
                2
            } else if occupied.contains(v) {
                1
            } else {
                0
            };
            g.color(v) * 3 + state
        })
        .collect();
    let colored = g.clone().with_colors(colors).expect("one color per vertex");
    canonical_form(&colored).labeling
}

/// Vertex of `set` with the smallest `rank`.
fn min_by_rank(set: impl IntoIterator<Item = Vertex>, rank: &[usize]) -> Option<Vertex> {
    set.into_iter().min_by_key(|&v| rank[v])
}

fn analysis_err(e: AnalysisError) -> AlgoError {
    match e {
        AnalysisError::VertexTransitive => AlgoError::Classification("graph is vertex-transitive".into()),
        other => AlgoError::Analysis(other),
    }
}
