use serde::Serialize;

use crate::analysis::{build_gprime, gprime_vertices, select_o1_o2, smallest_terminal_index};
use crate::canon::canonize;
use crate::error::AlgoError;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::sim::View;

use super::terminal::Terminal;
use super::{analysis_err, min_by_rank, state_rank, Algorithm, TaskId};

/// Gathering on graphs without a terminal orbit: funnel every robot into
/// one component `CC` of `G[O_2]` plus its `O_1` neighborhood, where the
/// terminal-orbit algorithm finishes the job.
#[derive(Clone, Copy, Debug, Default)]
pub struct NonTerminal;

/// Orbit and component structure of the host graph; independent of the
/// robots.
#[derive(Clone, Debug)]
pub struct Layout {
    pub o1: VertexSet,
    pub o2: VertexSet,
    /// Connected components of `G[O_2]`.
    pub comps: Vec<VertexSet>,
    /// `dist[c][v]`: distance from `v` to component `c`.
    pub dist: Vec<Vec<usize>>,
    /// Vertex set of `G'` for each component.
    pub gprime: Vec<VertexSet>,
}

impl Layout {
    pub fn new(g: &Graph) -> Result<Layout, AlgoError> {
        let orbits = canonize(g).orbits;
        if smallest_terminal_index(g, &orbits).map_err(analysis_err)?.is_some() {
            return Err(AlgoError::HasTerminalOrbit);
        }
        let (i1, i2) = select_o1_o2(g, &orbits).map_err(analysis_err)?;
        let o1 = orbits.orbits()[i1].clone();
        let o2 = orbits.orbits()[i2].clone();
        let comps = g.connected_components(&o2);
        let dist = comps
            .iter()
            .map(|c| g.distances_to_set(c).into_iter().map(|d| d.expect("graph is connected")).collect())
            .collect();
        let gprime = comps.iter().map(|c| gprime_vertices(g, &o1, c)).collect();
        Ok(Layout { o1, o2, comps, dist, gprime })
    }

    fn comp_key(&self, c: usize, rank: &[usize]) -> usize {
        self.comps[c].iter().map(|v| rank[v]).min().expect("components are nonempty")
    }
}

/// A robot on `rear` moves onto the adjacent `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Trickle {
    pub rear: Vertex,
    pub head: Vertex,
}

/// The classification of one configuration together with the sets named
/// by the matching precondition.
#[derive(Clone, Debug, Serialize)]
pub struct NotTContext {
    pub task: TaskId,
    /// `CC` for Task 2 and 4, `CC_1` for Task 3.
    pub cc: Option<usize>,
    /// `CC_2` for Task 3.
    pub cc2: Option<usize>,
    pub f: VertexSet,
    /// `U`, or `U_1` for Task 3.
    pub u: VertexSet,
    /// `U_2` for Task 3.
    pub u2: VertexSet,
    pub m: VertexSet,
    /// Vertices whose robots walk toward a component, each with the index of
    /// the component it heads for.
    pub walkers: Vec<(Vertex, usize)>,
    pub trickles: Vec<Trickle>,
}

impl NotTContext {
    fn new(task: TaskId, n: usize) -> Self {
        NotTContext {
            task,
            cc: None,
            cc2: None,
            f: VertexSet::new(n),
            u: VertexSet::new(n),
            u2: VertexSet::new(n),
            m: VertexSet::new(n),
            walkers: Vec::new(),
            trickles: Vec::new(),
        }
    }

    /// Rear vertices of the trickle moves.
    pub fn rears(&self) -> Vec<Vertex> {
        self.trickles.iter().map(|t| t.rear).collect()
    }
}

/// One side of a Task 3 configuration: the head in `CC_i` closest to the
/// other component and an optional rear one step behind it.
#[derive(Clone, Copy, Debug)]
struct Side {
    head: Vertex,
    rear: Option<Vertex>,
}

impl Side {
    fn members(&self) -> impl Iterator<Item = Vertex> {
        std::iter::once(self.head).chain(self.rear)
    }

    fn len(&self) -> usize {
        1 + self.rear.is_some() as usize
    }
}

fn side_options(g: &Graph, lay: &Layout, occ: &VertexSet, own: usize, other: usize) -> Vec<Side> {
    let inside = occ.intersection(&lay.comps[own]);
    let dist = &lay.dist[other];
    let mut out = Vec::new();
    for h in inside.iter() {
        if inside.len() == 1 {
            out.push(Side { head: h, rear: None });
        }
        for &r in g.neighbors(h) {
            if occ.contains(r)
                && !lay.comps[other].contains(r)
                && dist[r] == dist[h] + 1
                && inside.iter().all(|x| x == h || x == r)
            {
                out.push(Side { head: h, rear: Some(r) });
            }
        }
    }
    out
}

fn classify_t3(g: &Graph, lay: &Layout, occ: &VertexSet, a: usize, b: usize, rank: &[usize]) -> Option<NotTContext> {
    let n = g.n();
    let mut best: Option<((usize, Vec<usize>), Side, Side)> = None;
    for sa in side_options(g, lay, occ, a, b) {
        for sb in side_options(g, lay, occ, b, a) {
            if sa.members().any(|x| sb.members().any(|y| x == y)) {
                continue;
            }
            let mut rest = occ.clone();
            for x in sa.members().chain(sb.members()) {
                rest.remove(x);
            }
            if !rest.is_subset(&lay.o1) {
                continue;
            }
            let (da, db) = (&lay.dist[a], &lay.dist[b]);
            if rest.iter().any(|f| db[f] <= db[sa.head] || da[f] <= da[sb.head]) {
                continue;
            }
            let mut ranks: Vec<usize> = sa.members().chain(sb.members()).map(|v| rank[v]).collect();
            ranks.sort_unstable();
            let key = (sa.len() + sb.len(), ranks);
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, sa, sb));
            }
        }
    }
    let (_, sa, sb) = best?;
    let task = match (sa.len(), sb.len()) {
        (1, 1) => TaskId::T3i,
        (2, 2) => TaskId::T3iii,
        _ => TaskId::T3ii,
    };
    let mut ctx = NotTContext::new(task, n);
    ctx.cc = Some(a);
    ctx.cc2 = Some(b);
    ctx.u = VertexSet::from_vertices(n, sa.members());
    ctx.u2 = VertexSet::from_vertices(n, sb.members());
    ctx.f = occ.difference(&ctx.u).difference(&ctx.u2);
    for (side, target) in [(sa, b), (sb, a)] {
        match side.rear {
            Some(rear) => ctx.trickles.push(Trickle { rear, head: side.head }),
            None => ctx.walkers.push((side.head, target)),
        }
    }
    Some(ctx)
}

/// Task 2 structure relative to the occupied component `c`, if any.
fn classify_t2_for(g: &Graph, lay: &Layout, occ: &VertexSet, c: usize) -> Option<NotTContext> {
    let n = g.n();
    let dist = &lay.dist[c];
    let u = occ.intersection(&lay.comps[c]);
    let x = occ.difference(&lay.comps[c]);
    let d = x.iter().map(|v| dist[v]).min()?;
    let closest: Vec<Vertex> = x.iter().filter(|&v| dist[v] == d).collect();
    let mut ctx;
    if closest.len() >= 2 {
        // a unique closest vertex would be the M front
        if !x.is_subset(&lay.o1) {
            return None;
        }
        ctx = NotTContext::new(TaskId::T2ii, n);
        ctx.f = x;
        ctx.walkers = closest.into_iter().map(|v| (v, c)).collect();
    } else {
        let [h] = closest[..] else { return None };
        let behind: Vec<Vertex> = x.iter().filter(|&r| dist[r] == d + 1 && g.has_edge(r, h)).collect();
        let outside: Vec<Vertex> = behind.iter().copied().filter(|&r| !lay.o1.contains(r)).collect();
        let rears = if outside.is_empty() { behind } else { outside };
        let mut m = VertexSet::from_vertices(n, rears.iter().copied());
        m.insert(h);
        let rest = x.difference(&m);
        if !rest.is_subset(&lay.o1) || rears.iter().filter(|&&r| !lay.o1.contains(r)).count() > 1 {
            return None;
        }
        if rears.is_empty() {
            ctx = NotTContext::new(TaskId::T2iii, n);
            ctx.walkers = vec![(h, c)];
        } else {
            ctx = NotTContext::new(TaskId::T2iv, n);
            ctx.trickles = rears.into_iter().map(|rear| Trickle { rear, head: h }).collect();
        }
        ctx.m = m;
        ctx.f = rest;
    }
    ctx.cc = Some(c);
    ctx.u = u;
    Some(ctx)
}

impl NonTerminal {
    /// Evaluates the preconditions from the last task back to the first.
    /// `rank` breaks ties between structurally equivalent choices.
    pub fn classify_with(g: &Graph, lay: &Layout, occ: &VertexSet, rank: &[usize]) -> Result<NotTContext, AlgoError> {
        let n = g.n();
        if occ.is_empty() {
            return Err(AlgoError::Classification("no occupied vertex".into()));
        }
        if occ.len() == 1 {
            return Ok(NotTContext::new(TaskId::Final, n));
        }

        let inside: Vec<usize> = (0..lay.comps.len()).filter(|&c| occ.is_subset(&lay.gprime[c])).collect();
        if let Some(&c) = inside.iter().min_by_key(|&&c| lay.comp_key(c, rank)) {
            let mut ctx = NotTContext::new(TaskId::T4, n);
            ctx.cc = Some(c);
            ctx.u = occ.intersection(&lay.comps[c]);
            ctx.f = occ.difference(&ctx.u);
            return Ok(ctx);
        }

        let occupied_comps: Vec<usize> =
            (0..lay.comps.len()).filter(|&c| !occ.is_disjoint(&lay.comps[c])).collect();
        if let [a, b] = occupied_comps[..] {
            if let Some(ctx) = classify_t3(g, lay, occ, a, b, rank) {
                return Ok(ctx);
            }
        }

        if occupied_comps.is_empty() {
            if occ.is_subset(&lay.o1) {
                let mut ctx = NotTContext::new(TaskId::T2i, n);
                ctx.f = occ.clone();
                return Ok(ctx);
            }
        } else {
            let best = occupied_comps
                .iter()
                .filter_map(|&c| classify_t2_for(g, lay, occ, c))
                .min_by_key(|ctx| {
                    let c = ctx.cc.expect("task 2 sets CC");
                    (std::cmp::Reverse(ctx.u.len()), ctx.task, lay.comp_key(c, rank))
                });
            if let Some(ctx) = best {
                return Ok(ctx);
            }
        }

        Ok(NotTContext::new(TaskId::T1, n))
    }

    /// Move of the robot on `own` in the classified configuration.
    pub fn step(g: &Graph, lay: &Layout, occ: &VertexSet, own: Vertex, ctx: &NotTContext, rank: &[usize]) -> Result<Option<Vertex>, AlgoError> {
        let hop = match ctx.task {
            TaskId::Final => None,
            TaskId::T1 => {
                if lay.o1.contains(own) {
                    None
                } else {
                    g.first_hop_toward(own, &lay.o1, rank)
                }
            }
            TaskId::T2i => {
                if lay.o1.contains(own) {
                    min_by_rank(g.neighbors(own).iter().copied().filter(|&w| lay.o2.contains(w)), rank)
                } else {
                    None
                }
            }
            TaskId::T2ii | TaskId::T2iii | TaskId::T3i => ctx
                .walkers
                .iter()
                .find(|(v, _)| *v == own)
                .and_then(|&(_, c)| g.first_hop_toward(own, &lay.comps[c], rank)),
            TaskId::T2iv | TaskId::T3ii | TaskId::T3iii => {
                ctx.trickles.iter().find(|t| t.rear == own).map(|t| t.head)
            }
            TaskId::T4 => {
                let c = ctx.cc.expect("task 4 sets CC");
                let gp = build_gprime(g, &lay.o1, &lay.o2, &lay.comps[c]).map_err(analysis_err)?;
                let local_occ = VertexSet::from_vertices(
                    gp.back.len(),
                    gp.back.iter().enumerate().filter(|(_, &v)| occ.contains(v)).map(|(i, _)| i),
                );
                let local_own = gp.local_of(own).ok_or_else(|| {
                    AlgoError::Classification(format!("robot on {own} lies outside G'"))
                })?;
                let sub = View { graph: gp.graph, occupied: local_occ, own: local_own };
                Terminal.decide(&sub)?.map(|w| gp.back[w])
            }
            other => return Err(AlgoError::Classification(format!("unexpected task {other}"))),
        };
        Ok(hop)
    }
}

impl Algorithm for NonTerminal {
    fn name(&self) -> &'static str {
        "nonterminal"
    }

    fn classify(&self, g: &Graph, occupied: &VertexSet) -> Result<TaskId, AlgoError> {
        if occupied.len() <= 1 {
            return Ok(TaskId::Final);
        }
        let lay = Layout::new(g)?;
        let rank = state_rank(g, occupied, None);
        Ok(NonTerminal::classify_with(g, &lay, occupied, &rank)?.task)
    }

    fn decide(&self, view: &View) -> Result<Option<Vertex>, AlgoError> {
        if view.occupied.len() <= 1 {
            return Ok(None);
        }
        let g = &view.graph;
        let lay = Layout::new(g)?;
        let rank = state_rank(g, &view.occupied, Some(view.own));
        let ctx = NonTerminal::classify_with(g, &lay, &view.occupied, &rank)?;
        NonTerminal::step(g, &lay, &view.occupied, view.own, &ctx, &rank)
    }
}

/// Classification of a concrete configuration with the robot-independent
/// tie-break, for trace analysis.
pub fn context_of(g: &Graph, lay: &Layout, occupied: &VertexSet) -> Result<NotTContext, AlgoError> {
    let rank = state_rank(g, occupied, None);
    NonTerminal::classify_with(g, lay, occupied, &rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{butterfly, complete, empty, h_family};

    fn fig2_h() -> Graph {
        h_family(&empty(2), &complete(1), 3).unwrap()
    }

    fn occ(g: &Graph, vs: &[Vertex]) -> VertexSet {
        VertexSet::from_vertices(g.n(), vs.iter().copied())
    }

    #[test]
    fn all_in_first_orbit_is_task_2i() {
        let g = h_family(&empty(2), &complete(1), 4).unwrap();
        let lay = Layout::new(&g).unwrap();
        let o1 = lay.o1.to_vec();
        // two O_1 vertices that share no O_2 component
        let pick: Vec<Vertex> = o1
            .iter()
            .flat_map(|&a| o1.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| a < b && !lay.gprime.iter().any(|s| s.contains(a) && s.contains(b)))
            .map(|(a, b)| vec![a, b])
            .unwrap();
        assert_eq!(NonTerminal.classify(&g, &occ(&g, &pick)).unwrap(), TaskId::T2i);
    }

    #[test]
    fn inside_gprime_is_task_4() {
        let g = fig2_h();
        let lay = Layout::new(&g).unwrap();
        let set = lay.gprime[0].to_vec();
        assert_eq!(NonTerminal.classify(&g, &occ(&g, &set)).unwrap(), TaskId::T4);
    }

    #[test]
    fn single_vertex_is_final() {
        let g = butterfly(2).unwrap();
        assert_eq!(NonTerminal.classify(&g, &occ(&g, &[5])).unwrap(), TaskId::Final);
    }

    #[test]
    fn rejects_graph_with_terminal_orbit() {
        let g = crate::generators::star(3);
        assert!(matches!(NonTerminal.classify(&g, &occ(&g, &[1, 2])), Err(AlgoError::HasTerminalOrbit)));
    }
}
