//! Canonical labeling and automorphism orbits.
//!
//! The search is the classic individualization-refinement scheme: the
//! ordered partition is refined to an equitable one by iterated color
//! refinement, the first non-singleton cell is split by individualizing
//! each of its vertices in turn, and every discrete leaf yields a labeling
//! whose sorted edge list is its certificate. The lexicographically
//! smallest certificate wins. Leaves with equal certificates produce
//! automorphisms, which prune sibling subtrees and generate the orbits.

use itertools::Itertools;
use serde::Serialize;

use crate::error::AnalysisError;
use crate::graph::{Graph, Vertex, VertexSet};

type Cells = Vec<Vec<Vertex>>;
type Certificate = Vec<(u32, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    /// `labeling[v]` is the canonical label of vertex `v`.
    pub labeling: Vec<usize>,
    /// Edge list under the labeling, each pair ascending, list sorted.
    pub canonical_edges: Vec<(usize, usize)>,
    /// `canonical_colors[label]` is the color of the vertex carrying `label`.
    pub canonical_colors: Vec<u32>,
}

impl CanonicalForm {
    /// Hex encoding of the certificate: each edge as two big-endian u16
    /// labels.
    pub fn certificate_hex(&self) -> String {
        self.canonical_edges
            .iter()
            .flat_map(|&(a, b)| {
                let (a, b) = (a as u16, b as u16);
                a.to_be_bytes().into_iter().chain(b.to_be_bytes())
            })
            .map(|byte| format!("{byte:02x}"))
            .collect()
    }

    /// `inverse()[label]` is the vertex carrying `label`.
    pub fn inverse(&self) -> Vec<Vertex> {
        let mut inv = vec![0; self.labeling.len()];
        for (v, &l) in self.labeling.iter().enumerate() {
            inv[l] = v;
        }
        inv
    }
}

/// The orbits of `Aut(G)` in the agreed total order: `O < O'` iff the
/// smallest canonical label in `O` is smaller than the one in `O'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    orbits: Vec<VertexSet>,
    #[serde(skip)]
    orbit_of: Vec<usize>,
    /// Smallest canonical label per orbit (parallel to `orbits`).
    min_labels: Vec<usize>,
}

impl OrbitPartition {
    /// Orders `classes` by the smallest `rank` among their members.
    pub fn from_classes(n: usize, classes: Vec<VertexSet>, rank: &[usize]) -> Self {
        let mut keyed: Vec<(usize, VertexSet)> = classes
            .into_iter()
            .map(|c| (c.iter().map(|v| rank[v]).min().unwrap_or(usize::MAX), c))
            .collect();
        keyed.sort_by_key(|(k, _)| *k);
        let mut orbit_of = vec![0; n];
        for (i, (_, c)) in keyed.iter().enumerate() {
            for v in c.iter() {
                orbit_of[v] = i;
            }
        }
        let (min_labels, orbits) = keyed.into_iter().unzip();
        OrbitPartition { orbits, orbit_of, min_labels }
    }

    pub fn orbits(&self) -> &[VertexSet] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Order index of the orbit containing `v`.
    pub fn orbit_index(&self, v: Vertex) -> usize {
        self.orbit_of[v]
    }

    pub fn orbit_of(&self, v: Vertex) -> &VertexSet {
        &self.orbits[self.orbit_of[v]]
    }

    pub fn min_labels(&self) -> &[usize] {
        &self.min_labels
    }

    pub fn index_of(&self, set: &VertexSet) -> Option<usize> {
        self.orbits.iter().position(|o| o == set)
    }

    pub fn is_vertex_transitive(&self) -> bool {
        self.orbits.len() == 1
    }

    /// The partition as sorted vertex lists, independent of ordering.
    pub fn as_sorted_classes(&self) -> Vec<Vec<Vertex>> {
        let mut out: Vec<Vec<Vertex>> = self.orbits.iter().map(VertexSet::to_vec).collect();
        out.sort();
        out
    }
}

/// Result of one canonization search.
#[derive(Clone, Debug)]
pub struct Canonization {
    pub form: CanonicalForm,
    pub orbits: OrbitPartition,
    /// Automorphisms found during the search (`gen[v]` is the image of `v`).
    pub generators: Vec<Vec<Vertex>>,
}

pub fn canonize(g: &Graph) -> Canonization {
    let n = g.n();
    let mut search = Search { g, first: None, best: None, generators: Vec::new() };
    if n > 0 {
        let root = refine(g, initial_cells(g));
        search.dfs(root, &mut Vec::new());
    }
    let lab = search.best.map(|leaf| leaf.lab).unwrap_or_default();
    let mut labeling = vec![0; n];
    for (pos, &v) in lab.iter().enumerate() {
        labeling[v] = pos;
    }
    let mut canonical_edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (labeling[u], labeling[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    canonical_edges.sort_unstable();
    let canonical_colors = lab.iter().map(|&v| g.color(v)).collect();

    let mut uf = UnionFind::new(n);
    for gen in &search.generators {
        for (v, &w) in gen.iter().enumerate() {
            uf.union(v, w);
        }
    }
    let orbits = OrbitPartition::from_classes(n, uf.classes(), &labeling);
    Canonization {
        form: CanonicalForm { labeling, canonical_edges, canonical_colors },
        orbits,
        generators: search.generators,
    }
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    canonize(g).form
}

/// Exact orbits of `Aut(G)` (color-preserving when `g` is colored).
pub fn automorphism_orbits(g: &Graph) -> OrbitPartition {
    canonize(g).orbits
}

pub fn is_vertex_transitive(g: &Graph) -> bool {
    automorphism_orbits(g).is_vertex_transitive()
}

/// Test oracle: orbits from enumerating every vertex bijection. Orbits are
/// ordered by smallest vertex id since no canonical labeling is involved.
pub fn orbits_bruteforce(g: &Graph) -> Result<OrbitPartition, AnalysisError> {
    let n = g.n();
    if n > 8 {
        return Err(AnalysisError::TooLarge(n));
    }
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    let mut uf = UnionFind::new(n);
    for perm in (0..n).permutations(n) {
        let is_auto = (0..n).all(|v| g.color(perm[v]) == g.color(v))
            && edges.iter().all(|&(u, v)| g.has_edge(perm[u], perm[v]));
        if is_auto {
            for (v, &w) in perm.iter().enumerate() {
                uf.union(v, w);
            }
        }
    }
    let identity: Vec<usize> = (0..n).collect();
    Ok(OrbitPartition::from_classes(n, uf.classes(), &identity))
}

fn initial_cells(g: &Graph) -> Cells {
    (0..g.n())
        .sorted_by_key(|&v| (g.color(v), v))
        .chunk_by(|&v| g.color(v))
        .into_iter()
        .map(|(_, group)| group.collect())
        .collect()
}

/// Iterated color refinement of an ordered partition. Each cell splits in
/// place by the sorted multiset of neighbor cell indices, so the result
/// depends only on the input partition's structure, not on vertex ids.
fn refine(g: &Graph, mut cells: Cells) -> Cells {
    let n = g.n();
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = i;
            }
        }
        let mut keyed: Vec<((usize, Vec<usize>), Vertex)> = (0..n)
            .map(|v| {
                let mut sig: Vec<usize> = g.neighbors(v).iter().map(|&w| cell_of[w]).collect();
                sig.sort_unstable();
                ((cell_of[v], sig), v)
            })
            .collect();
        keyed.sort_unstable();
        let mut next: Cells = Vec::with_capacity(cells.len());
        let mut prev: Option<&(usize, Vec<usize>)> = None;
        for (key, v) in &keyed {
            if prev != Some(key) {
                next.push(Vec::new());
            }
            next.last_mut().expect("pushed above").push(*v);
            prev = Some(key);
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn individualize(cells: &Cells, target: usize, v: Vertex) -> Cells {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..target]);
    out.push(vec![v]);
    out.push(cells[target].iter().copied().filter(|&w| w != v).collect());
    out.extend_from_slice(&cells[target + 1..]);
    out
}

#[derive(Clone)]
struct Leaf {
    path: Vec<Vertex>,
    lab: Vec<Vertex>,
    cert: Certificate,
}

struct Search<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<Vertex>>,
}

impl Search<'_> {
    /// Explores the subtree under `cells`. A `Some(level)` return asks the
    /// caller chain to unwind to the node at depth `level`.
    fn dfs(&mut self, cells: Cells, path: &mut Vec<Vertex>) -> Option<usize> {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            return self.visit_leaf(&cells, path);
        };
        let depth = path.len();
        let mut tried: Vec<Vertex> = Vec::new();
        for &v in &cells[target] {
            if self.equivalent_to_tried(v, &tried, path) {
                continue;
            }
            tried.push(v);
            let child = refine(self.g, individualize(&cells, target, v));
            path.push(v);
            let unwind = self.dfs(child, path);
            path.pop();
            if let Some(level) = unwind {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    /// Whether `v` shares an orbit with an already explored sibling under
    /// the automorphisms found so far that fix `path` pointwise.
    fn equivalent_to_tried(&self, v: Vertex, tried: &[Vertex], path: &[Vertex]) -> bool {
        if tried.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.g.n());
        for gen in self.generators.iter().filter(|gen| path.iter().all(|&x| gen[x] == x)) {
            for (a, &b) in gen.iter().enumerate() {
                uf.union(a, b);
            }
        }
        let root = uf.find(v);
        tried.iter().any(|&t| uf.find(t) == root)
    }

    fn visit_leaf(&mut self, cells: &Cells, path: &[Vertex]) -> Option<usize> {
        let lab: Vec<Vertex> = cells.iter().map(|c| c[0]).collect();
        let cert = certificate(self.g, &lab);
        let leaf = Leaf { path: path.to_vec(), lab, cert };
        let Some(first) = &self.first else {
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return None;
        };
        if leaf.cert == first.cert {
            let level = common_prefix(&first.path, &leaf.path);
            let gen = map_between(&first.lab, &leaf.lab);
            self.generators.push(gen);
            return Some(level);
        }
        let best = self.best.as_ref().expect("best set with first");
        match leaf.cert.cmp(&best.cert) {
            std::cmp::Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            std::cmp::Ordering::Equal => {
                let level = common_prefix(&best.path, &leaf.path);
                let gen = map_between(&best.lab, &leaf.lab);
                self.generators.push(gen);
                Some(level)
            }
            std::cmp::Ordering::Greater => None,
        }
    }
}

fn certificate(g: &Graph, lab: &[Vertex]) -> Certificate {
    let mut pos = vec![0u32; lab.len()];
    for (p, &v) in lab.iter().enumerate() {
        pos[v] = p as u32;
    }
    let mut cert: Certificate = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (pos[u], pos[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    cert.sort_unstable();
    cert
}

/// The permutation sending `from[i]` to `to[i]` for every position `i`.
fn map_between(from: &[Vertex], to: &[Vertex]) -> Vec<Vertex> {
    let mut gen = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        gen[a] = b;
    }
    gen
}

fn common_prefix(a: &[Vertex], b: &[Vertex]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> Vec<VertexSet> {
        let n = self.parent.len();
        let mut by_root: Vec<Option<usize>> = vec![None; n];
        let mut out: Vec<VertexSet> = Vec::new();
        for v in 0..n {
            let r = self.find(v);
            let idx = *by_root[r].get_or_insert_with(|| {
                out.push(VertexSet::new(n));
                out.len() - 1
            });
            out[idx].insert(v);
        }
        out
    }
}
