use crate::analysis::smallest_terminal_index;
use crate::canon::canonize;
use crate::error::AlgoError;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::sim::View;

use super::{analysis_err, min_by_rank, state_rank, Algorithm, TaskId};

/// Gathering on graphs with a terminal orbit: empty the smallest terminal
/// orbit `O` down to one occupied vertex, then bring everyone to that
/// vertex along paths that touch `O` only at the end.
#[derive(Clone, Copy, Debug, Default)]
pub struct Terminal;

fn target_orbit(g: &Graph) -> Result<VertexSet, AlgoError> {
    let orbits = canonize(g).orbits;
    let i = smallest_terminal_index(g, &orbits).map_err(analysis_err)?.ok_or(AlgoError::NoTerminalOrbit)?;
    Ok(orbits.orbits()[i].clone())
}

fn classify_in(o: &VertexSet, occupied: &VertexSet) -> TaskId {
    if occupied.len() <= 1 {
        return TaskId::Final;
    }
    match occupied.intersection(o).len() {
        0 => TaskId::AtT3,
        1 => TaskId::AtT2,
        _ => TaskId::AtT1,
    }
}

impl Terminal {
    /// Task and move for the robot on `own`, with `o` the target orbit and
    /// `rank` the tie-breaking order.
    pub fn step(g: &Graph, o: &VertexSet, occupied: &VertexSet, own: Vertex, rank: &[usize]) -> (TaskId, Option<Vertex>) {
        let task = classify_in(o, occupied);
        let hop = match task {
            TaskId::AtT1 if o.contains(own) => {
                min_by_rank(g.neighbors(own).iter().copied().filter(|&w| !o.contains(w)), rank)
            }
            TaskId::AtT2 if !o.contains(own) => {
                let v = occupied.intersection(o).first().expect("one occupied vertex of O");
                let mut forbidden = o.clone();
                forbidden.remove(v);
                g.shortest_path_avoiding(own, v, &forbidden, rank).and_then(|p| p.first_hop())
            }
            TaskId::AtT3 => {
                let dist = g.distances_from(own).expect("view graph is connected");
                let target = o.iter().min_by_key(|&v| (dist[v], rank[v])).expect("orbit is nonempty");
                g.shortest_path_avoiding(own, target, &VertexSet::new(g.n()), rank).and_then(|p| p.first_hop())
            }
            _ => None,
        };
        (task, hop)
    }
}

impl Algorithm for Terminal {
    fn name(&self) -> &'static str {
        "terminal"
    }

    fn classify(&self, g: &Graph, occupied: &VertexSet) -> Result<TaskId, AlgoError> {
        if occupied.len() <= 1 {
            return Ok(TaskId::Final);
        }
        Ok(classify_in(&target_orbit(g)?, occupied))
    }

    fn decide(&self, view: &View) -> Result<Option<Vertex>, AlgoError> {
        if view.occupied.len() <= 1 {
            return Ok(None);
        }
        let o = target_orbit(&view.graph)?;
        let rank = state_rank(&view.graph, &view.occupied, Some(view.own));
        Ok(Terminal::step(&view.graph, &o, &view.occupied, view.own, &rank).1)
    }
}
