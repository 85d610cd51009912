//! Undirected simple graphs over dense vertex ids `0..n`, plus the
//! combinatorial queries (BFS, components, articulation points, twins,
//! restricted shortest paths) the rest of the crate is built on.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GraphError;

/// A vertex id in `0..n`.
pub type Vertex = usize;

/// Membership bitmap over the vertices of a host graph.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        s.0.insert_range(..);
        s
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut s = Self::new(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.set(v, false);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.minimum()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(&self.0 | &other.0)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(&self.0 & &other.0)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.0.clone();
        out.difference_with(&other.0);
        VertexSet(out)
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = self.0.clone();
        out.toggle_range(..);
        VertexSet(out)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Ordered list of vertices. Consecutive entries are adjacent, no repeats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path(pub Vec<Vertex>);

impl Path {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    /// The vertex after the start, if the path has at least one edge.
    pub fn first_hop(&self) -> Option<Vertex> {
        self.0.get(1).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    colors: Vec<u32>,
}

impl Graph {
    /// Builds a simple graph; rejects self-loops, duplicate edges and
    /// out-of-range endpoints. Connectivity is not required.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::InvalidVertex { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::InvalidVertex { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adj, colors: vec![0; n] })
    }

    /// Like [`Graph::from_edges`] but additionally requires a nonempty,
    /// connected graph. This is the constructor for simulation inputs.
    pub fn connected(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let g = Self::from_edges(n, edges)?;
        g.require_connected()?;
        Ok(g)
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        if self.n() == 0 {
            return Err(GraphError::Empty);
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self, GraphError> {
        if colors.len() != self.n() {
            return Err(GraphError::ColorCount { expected: self.n(), got: colors.len() });
        }
        self.colors = colors;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn color(&self, v: Vertex) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn is_colored(&self) -> bool {
        self.colors.iter().any(|&c| c != 0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, n: self.n() })
        }
    }

    /// Transports the graph (and its colors) through `perm`, where vertex
    /// `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        let n = self.n();
        let mut adj = vec![Vec::new(); n];
        let mut colors = vec![0; n];
        for v in 0..n {
            colors[perm[v]] = self.colors[v];
            let mut list: Vec<Vertex> = self.adj[v].iter().map(|&w| perm[w]).collect();
            list.sort_unstable();
            adj[perm[v]] = list;
        }
        Graph { adj, colors }
    }

    /// Induced subgraph on `keep`. Returns the subgraph and the map from
    /// subgraph ids back to host ids (ascending).
    pub fn induced_subgraph(&self, keep: &VertexSet) -> (Graph, Vec<Vertex>) {
        let back: Vec<Vertex> = keep.iter().collect();
        let mut fwd = vec![usize::MAX; self.n()];
        for (i, &v) in back.iter().enumerate() {
            fwd[v] = i;
        }
        let adj = back
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&w| fwd[w] != usize::MAX).map(|&w| fwd[w]).collect())
            .collect();
        let colors = back.iter().map(|&v| self.colors[v]).collect();
        (Graph { adj, colors }, back)
    }

    /// BFS hop counts from `s` inside the subgraph induced by `allowed`
    /// (`s` is always allowed). `None` marks unreachable vertices.
    pub fn bfs_within(&self, s: Vertex, allowed: Option<&VertexSet>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() && allowed.is_none_or(|a| a.contains(w)) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Multi-source BFS: hop distance from every vertex to the nearest
    /// member of `targets`.
    pub fn distances_to_set(&self, targets: &VertexSet) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for t in targets.iter() {
            dist[t] = Some(0);
            queue.push_back(t);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Exact hop distances from `s`. Requires every vertex to be reachable.
    pub fn distances_from(&self, s: Vertex) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(s)?;
        self.bfs_within(s, None)
            .into_iter()
            .map(|d| d.ok_or(GraphError::Disconnected))
            .collect()
    }

    /// All-pairs hop distances (row per source).
    pub fn distance_matrix(&self) -> Result<Vec<Vec<usize>>, GraphError> {
        (0..self.n()).map(|s| self.distances_from(s)).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_within(0, None).iter().all(Option::is_some)
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        self.require_connected()?;
        let mut best = 0;
        for s in 0..self.n() {
            let d = self.distances_from(s)?;
            best = best.max(d.into_iter().max().unwrap_or(0));
        }
        Ok(best)
    }

    pub fn eccentricity(&self, v: Vertex) -> Result<usize, GraphError> {
        Ok(self.distances_from(v)?.into_iter().max().unwrap_or(0))
    }

    /// Maximal connected pieces of the induced subgraph `G[s]`, ordered by
    /// their smallest vertex.
    pub fn connected_components(&self, s: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n());
        let mut out = Vec::new();
        for start in s.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::new(self.n());
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(u) = stack.pop() {
                comp.insert(u);
                for &w in &self.adj[u] {
                    if s.contains(w) && !seen.contains(w) {
                        seen.insert(w);
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Whether `G[s]` is connected (the empty set counts as connected).
    pub fn induces_connected(&self, s: &VertexSet) -> bool {
        self.connected_components(s).len() <= 1
    }

    /// Articulation points via iterative Tarjan lowlink.
    pub fn cut_vertices(&self) -> VertexSet {
        let n = self.n();
        let mut cut = VertexSet::new(n);
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            // (vertex, parent, next neighbor index)
            let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
            while let Some(top) = stack.last_mut() {
                let (u, parent, idx) = *top;
                if idx < self.adj[u].len() {
                    top.2 += 1;
                    let w = self.adj[u][idx];
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, u, 0));
                    } else if w != parent {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            cut.insert(parent);
                        }
                    }
                }
            }
            if root_children >= 2 {
                cut.insert(root);
            }
        }
        cut
    }

    pub fn universal_vertices(&self) -> VertexSet {
        let n = self.n();
        VertexSet::from_vertices(n, (0..n).filter(|&v| self.degree(v) + 1 == n))
    }

    /// Classes of vertices with identical open neighborhoods.
    pub fn false_twin_classes(&self) -> Vec<VertexSet> {
        self.group_by_key(|v| self.adj[v].clone())
    }

    /// Classes of vertices with identical closed neighborhoods.
    pub fn true_twin_classes(&self) -> Vec<VertexSet> {
        self.group_by_key(|v| {
            let mut closed = self.adj[v].clone();
            closed.push(v);
            closed.sort_unstable();
            closed
        })
    }

    fn group_by_key(&self, key: impl Fn(Vertex) -> Vec<Vertex>) -> Vec<VertexSet> {
        let mut keyed: Vec<(Vec<Vertex>, Vertex)> = (0..self.n()).map(|v| (key(v), v)).collect();
        keyed.sort();
        let mut out: Vec<VertexSet> = Vec::new();
        let mut prev: Option<&Vec<Vertex>> = None;
        for (k, v) in &keyed {
            if prev != Some(k) {
                out.push(VertexSet::new(self.n()));
            }
            out.last_mut().expect("pushed above").insert(*v);
            prev = Some(k);
        }
        out.sort_by_key(|s| s.first());
        out
    }

    /// Shortest `u`→`v` path in `G[(V \ forbidden) ∪ {u, v}]`.
    ///
    /// Among equal-length paths the one whose vertex sequence is
    /// lexicographically smallest under `rank` is returned, so callers that
    /// pass canonical labels get a labeling-independent answer.
    pub fn shortest_path_avoiding(
        &self,
        u: Vertex,
        v: Vertex,
        forbidden: &VertexSet,
        rank: &[usize],
    ) -> Option<Path> {
        if u == v {
            return Some(Path(vec![u]));
        }
        let mut allowed = forbidden.complement();
        allowed.insert(u);
        allowed.insert(v);
        let dist = self.bfs_within(v, Some(&allowed));
        let mut remaining = dist[u]?;
        let mut path = vec![u];
        let mut cur = u;
        while remaining > 0 {
            cur = self.adj[cur]
                .iter()
                .copied()
                .filter(|&w| allowed.contains(w) && dist[w] == Some(remaining - 1))
                .min_by_key(|&w| rank[w])?;
            path.push(cur);
            remaining -= 1;
        }
        Some(Path(path))
    }

    /// First hop of a shortest path from `from` to the nearest member of
    /// `targets`, breaking ties by smallest `rank`. `None` if `from` is
    /// already in `targets` or no target is reachable.
    pub fn first_hop_toward(&self, from: Vertex, targets: &VertexSet, rank: &[usize]) -> Option<Vertex> {
        let dist = self.distances_to_set(targets);
        let d = dist[from]?;
        if d == 0 {
            return None;
        }
        self.adj[from]
            .iter()
            .copied()
            .filter(|&w| dist[w] == Some(d - 1))
            .min_by_key(|&w| rank[w])
    }

    /// Serializes into the line-oriented text format understood by
    /// [`Graph::from_str`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        if self.is_colored() {
            out.push_str("colors");
            for c in &self.colors {
                out.push_str(&format!(" {c}"));
            }
            out.push('\n');
        }
        out
    }
}

impl FromStr for Graph {
    type Err = GraphError;

    /// Text format: first line `n`, then one `u v` edge per line, and an
    /// optional `colors c0 ... c{n-1}` line. `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, GraphError> {
        let parse_err = |line: usize, message: String| GraphError::Parse { line, message };
        let mut n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut colors: Option<Vec<u32>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let first = tokens.next().unwrap_or_default();
            let Some(count) = n else {
                let count = first
                    .parse::<usize>()
                    .map_err(|e| parse_err(line_no, format!("vertex count: {e}")))?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens after vertex count".into()));
                }
                n = Some(count);
                continue;
            };
            if first == "colors" {
                if colors.is_some() {
                    return Err(parse_err(line_no, "duplicate colors line".into()));
                }
                let list = tokens
                    .map(|t| t.parse::<u32>().map_err(|e| parse_err(line_no, format!("color: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if list.len() != count {
                    return Err(parse_err(line_no, format!("expected {count} colors, got {}", list.len())));
                }
                colors = Some(list);
                continue;
            }
            let u = first
                .parse::<usize>()
                .map_err(|e| parse_err(line_no, format!("edge endpoint: {e}")))?;
            let v = tokens
                .next()
                .ok_or_else(|| parse_err(line_no, "edge needs two endpoints".into()))?
                .parse::<usize>()
                .map_err(|e| parse_err(line_no, format!("edge endpoint: {e}")))?;
            if tokens.next().is_some() {
                return Err(parse_err(line_no, "trailing tokens after edge".into()));
            }
            edges.push((u, v));
        }
        let n = n.ok_or_else(|| parse_err(0, "missing vertex count".into()))?;
        let g = Graph::from_edges(n, edges)?;
        match colors {
            Some(c) => g.with_colors(c),
            None => Ok(g),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
