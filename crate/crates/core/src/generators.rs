//! Constructors for the graph families used as the test corpus.
//!
//! Random constructors draw from `ChaCha8Rng` seeded with the caller's
//! seed, so identical `(params, seed)` give identical graphs on every
//! platform.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, is_vertex_transitive};
use crate::error::GenerateError;
use crate::graph::{Graph, Vertex};

/// Name of the pseudo-random generator behind every seeded constructor.
pub const RNG_NAME: &str = "chacha8";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn build(n: usize, edges: Vec<(Vertex, Vertex)>) -> Graph {
    Graph::from_edges(n, edges).expect("constructor emits a simple graph")
}

/// `P_n`: vertices `0..n` in a line.
pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|v| (v - 1, v)).collect())
}

/// `C_n`. Panics for `n < 3`.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    build(n, (0..n).map(|v| (v, (v + 1) % n)).collect())
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
}

/// `tK_1`: `t` isolated vertices.
pub fn empty(t: usize) -> Graph {
    build(t, Vec::new())
}

/// `K_{a,b}` with the `a` side on `0..a` and the `b` side on `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    build(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect())
}

/// `K_{1,leaves}` with center 0.
pub fn star(leaves: usize) -> Graph {
    complete_bipartite(1, leaves)
}

/// Disjoint union; the result is disconnected whenever both sides are
/// nonempty.
pub fn disjoint_union(g1: &Graph, g2: &Graph) -> Graph {
    let off = g1.n();
    let edges = g1.edges().chain(g2.edges().map(|(u, v)| (u + off, v + off))).collect();
    build(g1.n() + g2.n(), edges)
}

/// `t` disjoint copies of `g`.
pub fn copies(t: usize, g: &Graph) -> Result<Graph, GenerateError> {
    if t == 0 || g.n() == 0 {
        return Err(GenerateError::EmptyOperand);
    }
    Ok((1..t).fold(g.clone(), |acc, _| disjoint_union(&acc, g)))
}

/// `G_1 + G_2`: disjoint union plus every edge between the two vertex sets.
pub fn join(g1: &Graph, g2: &Graph) -> Result<Graph, GenerateError> {
    if g1.n() == 0 || g2.n() == 0 {
        return Err(GenerateError::EmptyOperand);
    }
    let off = g1.n();
    let mut edges: Vec<(Vertex, Vertex)> = disjoint_union(g1, g2).edges().collect();
    edges.extend((0..g1.n()).flat_map(|u| (0..g2.n()).map(move |v| (u, v + off))));
    Ok(build(g1.n() + g2.n(), edges))
}

/// `Wd(m, n)`: `n` copies of `K_m` sharing vertex 0.
pub fn windmill(m: usize, n: usize) -> Result<Graph, GenerateError> {
    if m < 2 || n < 2 {
        return Err(GenerateError::Parameter(format!("windmill needs m >= 2 and n >= 2, got m={m}, n={n}")));
    }
    let mut edges = Vec::new();
    for blade in 0..n {
        let members: Vec<Vertex> =
            std::iter::once(0).chain((0..m - 1).map(|i| 1 + blade * (m - 1) + i)).collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    Ok(build(n * (m - 1) + 1, edges))
}

/// `BF(d)`: vertex `[l, c]` has id `l * 2^d + c`; `[l-1, c]` and `[l, c']`
/// are adjacent when `c' = c` or `c'` is `c` with bit `l - 1` flipped.
pub fn butterfly(d: usize) -> Result<Graph, GenerateError> {
    if d < 1 {
        return Err(GenerateError::Parameter(format!("butterfly needs d >= 1, got {d}")));
    }
    if d > 16 {
        return Err(GenerateError::Parameter(format!("butterfly dimension {d} too large")));
    }
    let width = 1usize << d;
    let id = |l: usize, c: usize| l * width + c;
    let mut edges = Vec::new();
    for l in 1..=d {
        for c in 0..width {
            edges.push((id(l - 1, c), id(l, c)));
            edges.push((id(l - 1, c), id(l, c ^ (1 << (l - 1)))));
        }
    }
    Ok(build((d + 1) * width, edges))
}

/// Layer of a butterfly vertex id.
pub fn butterfly_layer(d: usize, v: Vertex) -> usize {
    v >> d
}

/// `G(A, B; n)`: copies `A_0..A_{n-1}` and `B_0..B_{n-1}` with complete
/// joins `A_i + B_i` and `B_i + A_{i+1 mod n}`. Copy `A_i` occupies ids
/// starting at `i * (|A| + |B|)`, followed by `B_i`.
pub fn h_family(a: &Graph, b: &Graph, n: usize) -> Result<Graph, GenerateError> {
    if n < 3 {
        return Err(GenerateError::Parameter(format!("H-family needs n >= 3, got {n}")));
    }
    if a.n() == 0 || b.n() == 0 {
        return Err(GenerateError::EmptyOperand);
    }
    if !is_vertex_transitive(a) {
        return Err(GenerateError::NotVertexTransitive("A"));
    }
    if !is_vertex_transitive(b) {
        return Err(GenerateError::NotVertexTransitive("B"));
    }
    if a.n() == b.n() && canonical_form(a).canonical_edges == canonical_form(b).canonical_edges {
        return Err(GenerateError::IsomorphicComponents);
    }
    let block = a.n() + b.n();
    let a_start = |i: usize| (i % n) * block;
    let b_start = |i: usize| (i % n) * block + a.n();
    let mut edges = Vec::new();
    for i in 0..n {
        edges.extend(a.edges().map(|(u, v)| (a_start(i) + u, a_start(i) + v)));
        edges.extend(b.edges().map(|(u, v)| (b_start(i) + u, b_start(i) + v)));
        for y in 0..b.n() {
            for x in 0..a.n() {
                edges.push((a_start(i) + x, b_start(i) + y));
                edges.push((b_start(i) + y, a_start(i + 1) + x));
            }
        }
    }
    Ok(Graph::connected(n * block, edges)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdOp {
    Isolated,
    Dominating,
}

/// Threshold graph built from the empty graph by adding one vertex per op;
/// vertex `i` is added by `ops[i]`. The sequence must end with a dominating
/// vertex so the result is connected.
pub fn threshold(ops: &[ThresholdOp]) -> Result<Graph, GenerateError> {
    if ops.last() != Some(&ThresholdOp::Dominating) || ops.len() < 2 {
        return Err(GenerateError::Parameter(
            "threshold sequence needs at least 2 ops and must end with a dominating vertex".into(),
        ));
    }
    let edges: Vec<_> = ops
        .iter()
        .enumerate()
        .filter(|(_, op)| **op == ThresholdOp::Dominating)
        .flat_map(|(v, _)| (0..v).map(move |u| (u, v)))
        .collect();
    Ok(Graph::connected(ops.len(), edges)?)
}

pub fn random_threshold(n: usize, seed: u64) -> Result<Graph, GenerateError> {
    let mut rng = rng(seed);
    let mut ops: Vec<ThresholdOp> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { ThresholdOp::Dominating } else { ThresholdOp::Isolated })
        .collect();
    if let Some(last) = ops.last_mut() {
        *last = ThresholdOp::Dominating;
    }
    threshold(&ops)
}

/// Uniform random attachment tree: vertex `v` hangs off a uniformly chosen
/// earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::Parameter("random tree needs n >= 1".into()));
    }
    let mut rng = rng(seed);
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Ok(Graph::connected(n, edges)?)
}

/// Random tree plus every remaining pair independently with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Result<Graph, GenerateError> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::Parameter(format!("random graph needs n >= 1 and p in [0,1], got n={n}, p={p}")));
    }
    let mut rng = rng(seed);
    let parents: Vec<Vertex> = (1..n).map(|v| rng.gen_range(0..v)).collect();
    let mut edges: Vec<(Vertex, Vertex)> = parents.iter().enumerate().map(|(i, &u)| (u, i + 1)).collect();
    for v in 1..n {
        for u in 0..v {
            if parents[v - 1] != u && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::connected(n, edges)?)
}

/// Cactus from `blocks` random blocks, each a bridge or a cycle of length
/// 3..=6 glued at a uniformly chosen existing vertex.
pub fn random_cactus(blocks: usize, seed: u64) -> Result<Graph, GenerateError> {
    let mut rng = rng(seed);
    let mut n = 1;
    let mut edges = Vec::new();
    for _ in 0..blocks {
        let anchor = rng.gen_range(0..n);
        let len = if rng.gen_bool(0.3) { 2 } else { rng.gen_range(3..=6) };
        let mut prev = anchor;
        for _ in 1..len {
            edges.push((prev, n));
            prev = n;
            n += 1;
        }
        if len > 2 {
            edges.push((prev, anchor));
        }
    }
    Ok(Graph::connected(n, edges)?)
}

/// Block graph from `blocks` random cliques of size 2..=5 glued at a
/// uniformly chosen existing vertex.
pub fn random_block_graph(blocks: usize, seed: u64) -> Result<Graph, GenerateError> {
    let mut rng = rng(seed);
    let mut n = 1;
    let mut edges = Vec::new();
    for _ in 0..blocks {
        let anchor = rng.gen_range(0..n);
        let size = rng.gen_range(2..=5);
        let members: Vec<Vertex> = std::iter::once(anchor).chain(n..n + size - 1).collect();
        n += size - 1;
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::connected(n, edges)?)
}

/// Connected trivially perfect graph: the comparability graph of a random
/// rooted tree (each vertex adjacent to all of its ancestors).
pub fn random_trivially_perfect(n: usize, seed: u64) -> Result<Graph, GenerateError> {
    if n == 0 {
        return Err(GenerateError::Parameter("trivially perfect graph needs n >= 1".into()));
    }
    let mut rng = rng(seed);
    let mut parent: Vec<Option<Vertex>> = vec![None];
    let mut edges = Vec::new();
    for v in 1..n {
        let p = rng.gen_range(0..v);
        parent.push(Some(p));
        let mut anc = Some(p);
        while let Some(a) = anc {
            edges.push((a, v));
            anc = parent[a];
        }
    }
    Ok(Graph::connected(n, edges)?)
}

/// Small operand graphs written as `P<n>`, `C<n>`, `K<n>`, `K<a>,<b>`, or
/// `<t>K<n>` for `t` disjoint copies of `K_n` (so `2K1` is two isolated
/// vertices).
pub fn parse_small(spec: &str) -> Result<Graph, GenerateError> {
    let bad = || GenerateError::Parameter(format!("cannot parse graph {spec:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let s = spec.trim();
    if let Some(rest) = s.strip_prefix('P') {
        return Ok(path(num(rest)?));
    }
    if let Some(rest) = s.strip_prefix('C') {
        let n = num(rest)?;
        if n < 3 {
            return Err(bad());
        }
        return Ok(cycle(n));
    }
    let (t, body) = match s.find('K') {
        Some(0) => (1, &s[1..]),
        Some(i) => (num(&s[..i])?, &s[i + 1..]),
        None => return Err(bad()),
    };
    let base = match body.split_once(',') {
        Some((a, b)) => complete_bipartite(num(a)?, num(b)?),
        None => complete(num(body)?),
    };
    copies(t, &base)
}

/// A named family plus integer (or operand) parameters, as accepted by the
/// `generate` command and batch suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Star { leaves: usize },
    CompleteBipartite { a: usize, b: usize },
    Windmill { m: usize, n: usize },
    Butterfly { d: usize },
    HFamily { a: String, b: String, n: usize },
    Join { left: String, right: String },
    Threshold { ops: String },
    RandomThreshold { n: usize },
    RandomTree { n: usize },
    RandomConnected { n: usize, p: f64 },
    Cactus { blocks: usize },
    BlockGraph { blocks: usize },
    TriviallyPerfect { n: usize },
}

impl FamilySpec {
    /// Parses `name` with positional `params` (CLI form).
    pub fn from_args(name: &str, params: &[String]) -> Result<Self, GenerateError> {
        let want = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(GenerateError::Parameter(format!("{name} takes {k} parameter(s), got {}", params.len())))
            }
        };
        let int = |i: usize| {
            params[i]
                .parse::<usize>()
                .map_err(|_| GenerateError::Parameter(format!("{name}: expected an integer, got {:?}", params[i])))
        };
        let spec = match name {
            "path" => want(1).and_then(|_| Ok(FamilySpec::Path { n: int(0)? }))?,
            "cycle" => want(1).and_then(|_| Ok(FamilySpec::Cycle { n: int(0)? }))?,
            "complete" => want(1).and_then(|_| Ok(FamilySpec::Complete { n: int(0)? }))?,
            "star" => want(1).and_then(|_| Ok(FamilySpec::Star { leaves: int(0)? }))?,
            "complete-bipartite" => {
                want(2).and_then(|_| Ok(FamilySpec::CompleteBipartite { a: int(0)?, b: int(1)? }))?
            }
            "windmill" => want(2).and_then(|_| Ok(FamilySpec::Windmill { m: int(0)?, n: int(1)? }))?,
            "butterfly" => want(1).and_then(|_| Ok(FamilySpec::Butterfly { d: int(0)? }))?,
            "h-family" => want(3).and_then(|_| {
                Ok(FamilySpec::HFamily { a: params[0].clone(), b: params[1].clone(), n: int(2)? })
            })?,
            "join" => want(2).map(|_| FamilySpec::Join { left: params[0].clone(), right: params[1].clone() })?,
            "threshold" => want(1).map(|_| FamilySpec::Threshold { ops: params[0].clone() })?,
            "random-threshold" => want(1).and_then(|_| Ok(FamilySpec::RandomThreshold { n: int(0)? }))?,
            "random-tree" => want(1).and_then(|_| Ok(FamilySpec::RandomTree { n: int(0)? }))?,
            "random-connected" => want(2).and_then(|_| {
                let p = params[1]
                    .parse::<f64>()
                    .map_err(|_| GenerateError::Parameter(format!("{name}: expected a probability")))?;
                Ok(FamilySpec::RandomConnected { n: int(0)?, p })
            })?,
            "cactus" => want(1).and_then(|_| Ok(FamilySpec::Cactus { blocks: int(0)? }))?,
            "block-graph" => want(1).and_then(|_| Ok(FamilySpec::BlockGraph { blocks: int(0)? }))?,
            "trivially-perfect" => want(1).and_then(|_| Ok(FamilySpec::TriviallyPerfect { n: int(0)? }))?,
            other => return Err(GenerateError::UnknownFamily(other.to_string())),
        };
        Ok(spec)
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            FamilySpec::RandomThreshold { .. }
                | FamilySpec::RandomTree { .. }
                | FamilySpec::RandomConnected { .. }
                | FamilySpec::Cactus { .. }
                | FamilySpec::BlockGraph { .. }
                | FamilySpec::TriviallyPerfect { .. }
        )
    }

    /// Builds the graph; `seed` is ignored by deterministic families.
    pub fn build(&self, seed: u64) -> Result<Graph, GenerateError> {
        let g = match self {
            FamilySpec::Path { n } => path(*n),
            FamilySpec::Cycle { n } => {
                if *n < 3 {
                    return Err(GenerateError::Parameter(format!("cycle needs n >= 3, got {n}")));
                }
                cycle(*n)
            }
            FamilySpec::Complete { n } => complete(*n),
            FamilySpec::Star { leaves } => star(*leaves),
            FamilySpec::CompleteBipartite { a, b } => complete_bipartite(*a, *b),
            FamilySpec::Windmill { m, n } => windmill(*m, *n)?,
            FamilySpec::Butterfly { d } => butterfly(*d)?,
            FamilySpec::HFamily { a, b, n } => h_family(&parse_small(a)?, &parse_small(b)?, *n)?,
            FamilySpec::Join { left, right } => join(&parse_small(left)?, &parse_small(right)?)?,
            FamilySpec::Threshold { ops } => threshold(&parse_threshold_ops(ops)?)?,
            FamilySpec::RandomThreshold { n } => random_threshold(*n, seed)?,
            FamilySpec::RandomTree { n } => random_tree(*n, seed)?,
            FamilySpec::RandomConnected { n, p } => random_connected(*n, *p, seed)?,
            FamilySpec::Cactus { blocks } => random_cactus(*blocks, seed)?,
            FamilySpec::BlockGraph { blocks } => random_block_graph(*blocks, seed)?,
            FamilySpec::TriviallyPerfect { n } => random_trivially_perfect(*n, seed)?,
        };
        g.require_connected()?;
        Ok(g)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Path { n } => write!(f, "path({n})"),
            FamilySpec::Cycle { n } => write!(f, "cycle({n})"),
            FamilySpec::Complete { n } => write!(f, "complete({n})"),
            FamilySpec::Star { leaves } => write!(f, "star({leaves})"),
            FamilySpec::CompleteBipartite { a, b } => write!(f, "complete-bipartite({a},{b})"),
            FamilySpec::Windmill { m, n } => write!(f, "windmill({m},{n})"),
            FamilySpec::Butterfly { d } => write!(f, "butterfly({d})"),
            FamilySpec::HFamily { a, b, n } => write!(f, "h-family({a},{b},{n})"),
            FamilySpec::Join { left, right } => write!(f, "join({left},{right})"),
            FamilySpec::Threshold { ops } => write!(f, "threshold({ops})"),
            FamilySpec::RandomThreshold { n } => write!(f, "random-threshold({n})"),
            FamilySpec::RandomTree { n } => write!(f, "random-tree({n})"),
            FamilySpec::RandomConnected { n, p } => write!(f, "random-connected({n},{p})"),
            FamilySpec::Cactus { blocks } => write!(f, "cactus({blocks})"),
            FamilySpec::BlockGraph { blocks } => write!(f, "block-graph({blocks})"),
            FamilySpec::TriviallyPerfect { n } => write!(f, "trivially-perfect({n})"),
        }
    }
}

/// Threshold ops as a string over `d` (dominating) and `i` (isolated).
pub fn parse_threshold_ops(s: &str) -> Result<Vec<ThresholdOp>, GenerateError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            'd' | 'D' => Ok(ThresholdOp::Dominating),
            'i' | 'I' => Ok(ThresholdOp::Isolated),
            other => Err(GenerateError::Parameter(format!("threshold op {other:?} is not 'd' or 'i'"))),
        })
        .collect()
}

impl FromStr for ThresholdOp {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_threshold_ops(s)?.as_slice() {
            [op] => Ok(*op),
            _ => Err(GenerateError::Parameter(format!("expected a single threshold op, got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::automorphism_orbits;

    #[test]
    fn butterfly_sizes_and_degrees() {
        let bf1 = butterfly(1).unwrap();
        assert_eq!((bf1.n(), bf1.edge_count()), (4, 4));
        assert!(bf1.vertices().iter().all(|v| bf1.degree(v) == 2));

        let bf2 = butterfly(2).unwrap();
        assert_eq!((bf2.n(), bf2.edge_count()), (12, 16));
        assert_eq!(butterfly(3).unwrap().n(), 32);
        assert!(butterfly(0).is_err());

        for d in 1..=4 {
            let g = butterfly(d).unwrap();
            for v in g.vertices().iter() {
                let l = butterfly_layer(d, v);
                let expected = if l == 0 || l == d { 2 } else { 4 };
                assert_eq!(g.degree(v), expected, "d={d}, v={v}");
            }
        }
    }

    #[test]
    fn butterfly_orbits_pair_complementary_layers() {
        for d in 1..=3 {
            let g = butterfly(d).unwrap();
            let orbits = automorphism_orbits(&g);
            let mut expected: Vec<Vec<Vertex>> = (0..=d / 2)
                .map(|l| {
                    g.vertices().iter().filter(|&v| {
                        let lv = butterfly_layer(d, v);
                        lv == l || lv == d - l
                    }).collect()
                })
                .collect();
            if d == 1 {
                expected = vec![(0..4).collect()];
            }
            expected.sort();
            assert_eq!(orbits.as_sorted_classes(), expected, "d={d}");
        }
    }

    #[test]
    fn h_family_sizes() {
        let g = h_family(&empty(2), &complete(1), 3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (9, 12));
        let g = h_family(&complete(2), &complete(1), 4).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(automorphism_orbits(&g).len(), 2);
    }

    #[test]
    fn h_family_rejects_bad_operands() {
        assert!(matches!(h_family(&empty(2), &empty(2), 3), Err(GenerateError::IsomorphicComponents)));
        assert!(matches!(h_family(&path(3), &complete(1), 3), Err(GenerateError::NotVertexTransitive("A"))));
        assert!(matches!(h_family(&empty(2), &complete(1), 2), Err(GenerateError::Parameter(_))));
    }

    #[test]
    fn windmill_shapes() {
        let wd = windmill(3, 2).unwrap();
        assert_eq!(wd.n(), 5);
        assert_eq!(wd.degree(0), 4);
        assert!(wd.universal_vertices().contains(0));

        let wd = windmill(2, 3).unwrap();
        assert_eq!(canonical_form(&wd).canonical_edges, canonical_form(&star(3)).canonical_edges);
        assert!(windmill(1, 3).is_err());
        assert!(windmill(3, 1).is_err());
    }

    #[test]
    fn joins_and_threshold() {
        let g = join(&path(3), &empty(2)).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.is_connected());
        assert!(g.false_twin_classes().iter().any(|c| c.to_vec() == vec![3, 4]));
        assert!(join(&empty(0), &path(2)).is_err());

        let t = threshold(&parse_threshold_ops("did").unwrap()).unwrap();
        assert!(t.universal_vertices().contains(2));
        assert!(threshold(&parse_threshold_ops("ddi").unwrap()).is_err());
    }

    #[test]
    fn seeded_constructors_are_reproducible() {
        for seed in 0..5 {
            assert_eq!(random_tree(12, seed).unwrap(), random_tree(12, seed).unwrap());
            assert_eq!(random_cactus(4, seed).unwrap(), random_cactus(4, seed).unwrap());
            let g = random_connected(9, 0.3, seed).unwrap();
            assert!(g.is_connected());
            assert_eq!(random_tree(12, seed).unwrap().edge_count(), 11);
            let tp = random_trivially_perfect(8, seed).unwrap();
            assert!(tp.universal_vertices().contains(0));
        }
        assert_ne!(random_tree(20, 1).unwrap(), random_tree(20, 2).unwrap());
    }

    #[test]
    fn small_specs_and_family_args() {
        assert_eq!(parse_small("2K1").unwrap().n(), 2);
        assert_eq!(parse_small("K2").unwrap().edge_count(), 1);
        assert_eq!(parse_small("C4").unwrap().edge_count(), 4);
        assert_eq!(parse_small("K3,2").unwrap(), complete_bipartite(3, 2));
        assert!(parse_small("X3").is_err());

        let spec = FamilySpec::from_args("h-family", &["2K1".into(), "K1".into(), "3".into()]).unwrap();
        assert_eq!(spec.build(0).unwrap().n(), 9);
        assert!(matches!(FamilySpec::from_args("nope", &[]), Err(GenerateError::UnknownFamily(_))));
        assert!(FamilySpec::from_args("path", &[]).is_err());
    }
}
