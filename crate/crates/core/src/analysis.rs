//! Terminal orbits, the structural predicates that force one, and the
//! orbit/component selection used by the non-terminal algorithm.

use serde::Serialize;

use crate::canon::{canonize, OrbitPartition};
use crate::error::AnalysisError;
use crate::graph::{Graph, Vertex, VertexSet};

/// Evidence that an orbit is not terminal: `u` outside `O` cannot reach
/// `v ∈ O` without first entering `O`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub u: Vertex,
    pub v: Vertex,
    pub orbit: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PredicateFlags {
    pub has_universal: bool,
    pub has_cut_vertex: bool,
    pub has_twin_orbit: bool,
    pub has_connected_proper_orbit_subset: bool,
}

impl PredicateFlags {
    pub fn any(&self) -> bool {
        self.has_universal || self.has_cut_vertex || self.has_twin_orbit || self.has_connected_proper_orbit_subset
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub index: usize,
    pub vertices: Vec<Vertex>,
    pub min_label: usize,
    /// `None` when the graph is vertex-transitive and the question is void.
    pub terminal: Option<bool>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TerminalReport {
    pub n: usize,
    pub edges: usize,
    pub diameter: usize,
    pub vertex_transitive: bool,
    pub certificate: String,
    pub orbits: Vec<OrbitReport>,
    pub smallest_terminal: Option<usize>,
    pub predicates: PredicateFlags,
}

fn check_orbit(orbits: &OrbitPartition, o: &VertexSet) -> Result<usize, AnalysisError> {
    orbits.index_of(o).ok_or_else(|| AnalysisError::NotAnOrbit(o.to_vec()))
}

/// For `v ∈ O`, a vertex outside `O` that cannot reach `v` inside
/// `G[(V∖O) ∪ {v}]`.
fn blocked_vertex(g: &Graph, o: &VertexSet, v: Vertex) -> Option<Vertex> {
    let mut allowed = o.complement();
    allowed.insert(v);
    let dist = g.bfs_within(v, Some(&allowed));
    let blocked = allowed.iter().find(|&u| dist[u].is_none());
    blocked
}

/// Terminality of `o` given an already computed orbit partition. Every
/// member of `o` is tested and the answers must agree.
pub fn is_terminal_in(g: &Graph, orbits: &OrbitPartition, o: &VertexSet) -> Result<bool, AnalysisError> {
    terminal_with_witness(g, orbits, o).map(|w| w.is_none())
}

fn terminal_with_witness(
    g: &Graph,
    orbits: &OrbitPartition,
    o: &VertexSet,
) -> Result<Option<Witness>, AnalysisError> {
    let index = check_orbit(orbits, o)?;
    if o.len() == g.n() {
        return Err(AnalysisError::VertexTransitive);
    }
    let mut first: Option<bool> = None;
    let mut witness = None;
    for v in o.iter() {
        let blocked = blocked_vertex(g, o, v);
        let ok = blocked.is_none();
        match first {
            None => first = Some(ok),
            Some(prev) if prev != ok => return Err(AnalysisError::InconsistentOrbit(o.to_vec())),
            Some(_) => {}
        }
        if witness.is_none() {
            witness = blocked.map(|u| Witness { u, v, orbit: index });
        }
    }
    Ok(witness)
}

pub fn is_terminal(g: &Graph, o: &VertexSet) -> Result<bool, AnalysisError> {
    g.require_connected()?;
    is_terminal_in(g, &canonize(g).orbits, o)
}

/// Terminal flag per orbit, in orbit order.
pub fn terminal_flags(g: &Graph, orbits: &OrbitPartition) -> Result<Vec<bool>, AnalysisError> {
    orbits.orbits().iter().map(|o| is_terminal_in(g, orbits, o)).collect()
}

/// Index of the first terminal orbit in the orbit order.
pub fn smallest_terminal_index(g: &Graph, orbits: &OrbitPartition) -> Result<Option<usize>, AnalysisError> {
    if orbits.is_vertex_transitive() {
        return Err(AnalysisError::VertexTransitive);
    }
    for (i, o) in orbits.orbits().iter().enumerate() {
        if is_terminal_in(g, orbits, o)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

pub fn smallest_terminal_orbit(g: &Graph) -> Result<Option<VertexSet>, AnalysisError> {
    g.require_connected()?;
    let orbits = canonize(g).orbits;
    Ok(smallest_terminal_index(g, &orbits)?.map(|i| orbits.orbits()[i].clone()))
}

/// Whether some proper nonempty union of orbits induces a connected
/// subgraph.
pub fn thm2_holds(g: &Graph, orbits: &OrbitPartition) -> Result<bool, AnalysisError> {
    let k = orbits.len();
    if k == 1 {
        return Err(AnalysisError::VertexTransitive);
    }
    if k > 20 {
        return Err(AnalysisError::TooManyOrbits(k));
    }
    let all = (1u32 << k) - 1;
    Ok((1..all).any(|mask| {
        let mut s = VertexSet::new(g.n());
        for (i, o) in orbits.orbits().iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s.union(o);
            }
        }
        g.induces_connected(&s)
    }))
}

/// Universal vertex, cut vertex, and twin-orbit flags; the connected
/// orbit-subset flag is filled in only when the orbit count permits.
pub fn thm3_predicates(g: &Graph, orbits: &OrbitPartition) -> PredicateFlags {
    let false_twins = g.false_twin_classes();
    let true_twins = g.true_twin_classes();
    let inside_a_class =
        |o: &VertexSet, classes: &[VertexSet]| classes.iter().any(|c| o.is_subset(c));
    let has_twin_orbit = orbits
        .orbits()
        .iter()
        .any(|o| o.len() >= 2 && (inside_a_class(o, &false_twins) || inside_a_class(o, &true_twins)));
    PredicateFlags {
        has_universal: !g.universal_vertices().is_empty(),
        has_cut_vertex: !g.cut_vertices().is_empty(),
        has_twin_orbit,
        has_connected_proper_orbit_subset: thm2_holds(g, orbits).unwrap_or(false),
    }
}

/// Orbit indices `(O_1, O_2)`: the first orbit, and the earliest other orbit
/// sharing an edge with it.
pub fn select_o1_o2(g: &Graph, orbits: &OrbitPartition) -> Result<(usize, usize), AnalysisError> {
    if orbits.is_vertex_transitive() {
        return Err(AnalysisError::VertexTransitive);
    }
    let o1 = &orbits.orbits()[0];
    let o2 = (1..orbits.len())
        .find(|&j| orbits.orbits()[j].iter().any(|v| g.neighbors(v).iter().any(|&w| o1.contains(w))))
        .ok_or(AnalysisError::Graph(crate::error::GraphError::Disconnected))?;
    Ok((0, o2))
}

pub const COLOR_O1: u32 = 0;
pub const COLOR_O2: u32 = 1;

/// `G'` for a component `CC` of `G[O_2]`: `CC` plus its `O_1` neighbors,
/// colored by origin.
#[derive(Clone, Debug)]
pub struct GPrime {
    pub graph: Graph,
    /// `back[i]` is the host vertex of local vertex `i`.
    pub back: Vec<Vertex>,
    pub vertices: VertexSet,
}

impl GPrime {
    pub fn local_of(&self, v: Vertex) -> Option<Vertex> {
        self.back.iter().position(|&w| w == v)
    }
}

/// Vertex set of `G'` without building the graph.
pub fn gprime_vertices(g: &Graph, o1: &VertexSet, cc: &VertexSet) -> VertexSet {
    let mut keep = cc.clone();
    for v in cc.iter() {
        for &w in g.neighbors(v) {
            if o1.contains(w) {
                keep.insert(w);
            }
        }
    }
    keep
}

pub fn build_gprime(g: &Graph, o1: &VertexSet, o2: &VertexSet, cc: &VertexSet) -> Result<GPrime, AnalysisError> {
    if !g.connected_components(o2).iter().any(|c| c == cc) {
        return Err(AnalysisError::NotAComponent(format!("{cc:?}")));
    }
    let keep = gprime_vertices(g, o1, cc);
    let (sub, back) = g.induced_subgraph(&keep);
    let colors = back.iter().map(|&v| if o1.contains(v) { COLOR_O1 } else { COLOR_O2 }).collect();
    let graph = sub.with_colors(colors)?;
    graph.require_connected()?;
    let orbits = canonize(&graph).orbits;
    if smallest_terminal_index(&graph, &orbits)?.is_none() {
        return Err(AnalysisError::NoTerminalInSubgraph);
    }
    Ok(GPrime { graph, back, vertices: keep })
}

/// Largest `O`-avoiding distance from any vertex to any member of `O`,
/// or `None` if some vertex cannot reach some member that way.
pub fn avoiding_radius(g: &Graph, o: &VertexSet) -> Option<usize> {
    let mut worst = 0;
    for v in o.iter() {
        let mut allowed = o.complement();
        allowed.insert(v);
        let dist = g.bfs_within(v, Some(&allowed));
        for u in g.vertices().iter() {
            // robots inside O leave it first, which costs one more hop
            let d = if o.contains(u) && u != v {
                g.neighbors(u).iter().filter_map(|&w| dist[w]).min().map(|d| d + 1)?
            } else {
                dist[u]?
            };
            worst = worst.max(d);
        }
    }
    Some(worst)
}

pub fn analyze(g: &Graph) -> Result<TerminalReport, AnalysisError> {
    g.require_connected()?;
    let canon = canonize(g);
    let orbits = &canon.orbits;
    let vt = orbits.is_vertex_transitive();
    let mut reports = Vec::with_capacity(orbits.len());
    let mut smallest_terminal = None;
    for (index, o) in orbits.orbits().iter().enumerate() {
        let (terminal, witness) = if vt {
            (None, None)
        } else {
            let w = terminal_with_witness(g, orbits, o)?;
            (Some(w.is_none()), w)
        };
        if terminal == Some(true) && smallest_terminal.is_none() {
            smallest_terminal = Some(index);
        }
        reports.push(OrbitReport {
            index,
            vertices: o.to_vec(),
            min_label: orbits.min_labels()[index],
            terminal,
            witness,
        });
    }
    Ok(TerminalReport {
        n: g.n(),
        edges: g.edge_count(),
        diameter: g.diameter()?,
        vertex_transitive: vt,
        certificate: canon.form.certificate_hex(),
        orbits: reports,
        smallest_terminal,
        predicates: thm3_predicates(g, orbits),
    })
}
