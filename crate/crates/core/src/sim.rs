//! Round-Robin execution of an algorithm on anonymous, oblivious robots.
//!
//! Every activation hands the algorithm a [`View`]: the graph and occupancy
//! under a fresh random relabeling plus the robot's own (relabeled)
//! position. Nothing else crosses the boundary, so an algorithm cannot
//! count robots on a vertex, recognize robots, or remember earlier rounds.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algos::{state_rank, Algorithm, TaskId};
use crate::canon::canonize;
use crate::error::SimError;
use crate::generators::RNG_NAME;
use crate::graph::{Graph, Vertex, VertexSet};

pub const TRACE_SCHEMA: &str = "gather-trace/1";

/// Exact robot positions (index = robot id, engine-side only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement(pub Vec<Vertex>);

impl Placement {
    pub fn validate(&self, g: &Graph) -> Result<(), SimError> {
        if self.0.is_empty() {
            return Err(SimError::EmptyPlacement);
        }
        match self.0.iter().enumerate().find(|(_, &v)| v >= g.n()) {
            Some((robot, &vertex)) => Err(SimError::InvalidPlacement { robot, vertex }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of robots on `v`.
    pub fn count_on(&self, v: Vertex) -> usize {
        self.0.iter().filter(|&&w| w == v).count()
    }

    pub fn count_in(&self, set: &VertexSet) -> usize {
        self.0.iter().filter(|&&w| set.contains(w)).count()
    }
}

/// What the robots perceive: occupied vertices without multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub occupied: VertexSet,
}

impl Configuration {
    pub fn snapshot(p: &Placement, g: &Graph) -> Configuration {
        Configuration { occupied: VertexSet::from_vertices(g.n(), p.0.iter().copied()) }
    }

    pub fn occ(&self) -> usize {
        self.occupied.len()
    }

    /// Largest distance between two occupied vertices.
    pub fn delta(&self, g: &Graph) -> usize {
        let occupied = self.occupied.to_vec();
        occupied
            .iter()
            .map(|&s| {
                let dist = g.bfs_within(s, None);
                occupied.iter().filter_map(|&t| dist[t]).max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_final(&self) -> bool {
        self.occ() == 1
    }
}

/// One robot's Look result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    pub graph: Graph,
    pub occupied: VertexSet,
    pub own: Vertex,
}

/// Builds the view seen through `relabeling` (vertex `v` appears as
/// `relabeling[v]`).
pub fn make_view(g: &Graph, occupied: &VertexSet, own: Vertex, relabeling: &[Vertex]) -> View {
    View {
        graph: g.relabel(relabeling),
        occupied: VertexSet::from_vertices(g.n(), occupied.iter().map(|v| relabeling[v])),
        own: relabeling[own],
    }
}

pub fn invert(relabeling: &[Vertex]) -> Vec<Vertex> {
    let mut inv = vec![0; relabeling.len()];
    for (v, &w) in relabeling.iter().enumerate() {
        inv[w] = v;
    }
    inv
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryMode {
    /// One activation order, fixed at the start and repeated every epoch.
    Fixed,
    /// A new activation order every epoch.
    PerEpoch,
}

impl std::str::FromStr for AdversaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(AdversaryMode::Fixed),
            "per-epoch" => Ok(AdversaryMode::PerEpoch),
            other => Err(format!("unknown adversary mode {other:?} (expected fixed or per-epoch)")),
        }
    }
}

/// Seeded source of activation orders and per-activation relabelings.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub seed: u64,
    pub mode: AdversaryMode,
    order_rng: ChaCha8Rng,
    relabel_rng: ChaCha8Rng,
    fixed: Option<Vec<usize>>,
}

impl Adversary {
    pub fn new(seed: u64, mode: AdversaryMode) -> Self {
        let order_rng = ChaCha8Rng::seed_from_u64(seed);
        let mut relabel_rng = ChaCha8Rng::seed_from_u64(seed);
        relabel_rng.set_stream(1);
        Adversary { seed, mode, order_rng, relabel_rng, fixed: None }
    }

    /// Activation order for the next epoch.
    pub fn next_order(&mut self, k: usize) -> Vec<usize> {
        if let (AdversaryMode::Fixed, Some(order)) = (self.mode, &self.fixed) {
            return order.clone();
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut self.order_rng);
        if self.mode == AdversaryMode::Fixed {
            self.fixed = Some(order.clone());
        }
        order
    }

    pub fn relabeling(&mut self, n: usize) -> Vec<Vertex> {
        let mut perm: Vec<Vertex> = (0..n).collect();
        perm.shuffle(&mut self.relabel_rng);
        perm
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Gathered,
    EpochCapExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub epoch: usize,
    pub round: usize,
    pub robot: usize,
    /// Occupied vertices at Look time.
    pub observed: Vec<Vertex>,
    pub task: TaskId,
    pub from: Vertex,
    /// Equal to `from` for a nil move.
    pub to: Vertex,
}

impl RoundRecord {
    pub fn moved(&self) -> bool {
        self.from != self.to
    }
}

/// Double-evaluation tallies: how often two independent relabelings gave
/// the same concrete move, and how often they differed only by an
/// automorphism of the robot's view.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceStats {
    pub checked: usize,
    pub identical: usize,
    pub symmetric: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub schema: String,
    pub algorithm: String,
    pub seed: u64,
    pub rng: String,
    pub adversary: AdversaryMode,
    pub max_epochs: usize,
    pub robots: usize,
    pub initial_placement: Vec<Vertex>,
    pub initial_occ: usize,
    pub initial_delta: usize,
    pub rounds: Vec<RoundRecord>,
    pub outcome: Outcome,
    /// Epochs until gathering: rounds up to the gathering move, divided by
    /// the robot count and rounded up.
    pub epochs: usize,
    /// Nil-only epoch simulated after gathering; its rounds are the
    /// trailing `FINAL` records.
    pub stability_rounds: usize,
    pub final_vertex: Option<Vertex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equivariance: Option<EquivarianceStats>,
}

impl ExecutionTrace {
    pub fn gathered(&self) -> bool {
        self.outcome == Outcome::Gathered
    }

    /// Rounds before the stability epoch.
    pub fn active_rounds(&self) -> &[RoundRecord] {
        &self.rounds[..self.rounds.len() - self.stability_rounds]
    }

    /// Placement before each round, followed by the placement after the last.
    pub fn placements(&self) -> Vec<Placement> {
        let mut cur = self.initial_placement.clone();
        let mut out = vec![Placement(cur.clone())];
        for r in &self.rounds {
            cur[r.robot] = r.to;
            out.push(Placement(cur.clone()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub mode: AdversaryMode,
    /// `None` selects the default cap.
    pub max_epochs: Option<usize>,
    /// Evaluate every activation under a second independent relabeling and
    /// compare the mapped-back moves.
    pub double_eval: bool,
}

impl RunOptions {
    pub fn new(seed: u64, mode: AdversaryMode) -> Self {
        RunOptions { seed, mode, max_epochs: None, double_eval: false }
    }
}

/// `10 * (occ * delta + |V|)`.
pub fn default_epoch_cap(g: &Graph, p0: &Placement) -> usize {
    let c = Configuration::snapshot(p0, g);
    10 * (c.occ() * c.delta(g) + g.n())
}

fn decide_through(
    g: &Graph,
    occupied: &VertexSet,
    own: Vertex,
    algo: &dyn Algorithm,
    relabeling: &[Vertex],
) -> Result<Option<Vertex>, SimError> {
    let view = make_view(g, occupied, own, relabeling);
    let inv = invert(relabeling);
    Ok(algo.decide(&view)?.map(|w| inv[w]))
}

/// Whether some automorphism of `g` fixing `occupied` and `own` maps `a`
/// to `b`.
fn same_view_orbit(g: &Graph, occupied: &VertexSet, own: Vertex, a: Vertex, b: Vertex) -> bool {
    let colors = (0..g.n())
        .map(|v| {
            let state = if v == own {
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
    let orbits = canonize(&colored).orbits;
    orbits.orbit_index(a) == orbits.orbit_index(b)
}

pub fn run(g: &Graph, p0: &Placement, algo: &dyn Algorithm, opts: RunOptions) -> Result<ExecutionTrace, SimError> {
    g.require_connected()?;
    p0.validate(g)?;
    let max_epochs = opts.max_epochs.unwrap_or_else(|| default_epoch_cap(g, p0));
    if max_epochs == 0 {
        return Err(SimError::ZeroEpochCap);
    }
    let k = p0.len();
    let n = g.n();
    let start = Configuration::snapshot(p0, g);
    let mut adv = Adversary::new(opts.seed, opts.mode);
    let mut positions = p0.0.clone();
    let mut rounds = Vec::new();
    let mut eq = opts.double_eval.then(EquivarianceStats::default);
    let mut gathered_at = start.is_final().then_some(0usize);

    let mut epoch = 0;
    while gathered_at.is_none() && epoch < max_epochs {
        for robot in adv.next_order(k) {
            let occupied = VertexSet::from_vertices(n, positions.iter().copied());
            let from = positions[robot];
            let task = algo.classify(g, &occupied)?;
            let perm = adv.relabeling(n);
            let decision = decide_through(g, &occupied, from, algo, &perm)?;
            if let Some(stats) = eq.as_mut() {
                let perm2 = adv.relabeling(n);
                let second = decide_through(g, &occupied, from, algo, &perm2)?;
                stats.checked += 1;
                match (decision, second) {
                    (a, b) if a == b => stats.identical += 1,
                    (Some(a), Some(b)) if same_view_orbit(g, &occupied, from, a, b) => stats.symmetric += 1,
                    _ => {
                        return Err(SimError::NotEquivariant { round: rounds.len(), first: decision, second });
                    }
                }
            }
            let to = decision.unwrap_or(from);
            if to != from && !g.has_edge(from, to) {
                return Err(SimError::IllegalMove { round: rounds.len(), robot, from, to });
            }
            positions[robot] = to;
            rounds.push(RoundRecord { epoch, round: rounds.len(), robot, observed: occupied.to_vec(), task, from, to });
            if positions.iter().all(|&v| v == positions[0]) {
                gathered_at = Some(rounds.len());
                break;
            }
        }
        epoch += 1;
    }

    let (outcome, epochs, stability_rounds, final_vertex) = match gathered_at {
        Some(done) => {
            let stability_epoch = done.div_ceil(k);
            let before = rounds.len();
            for robot in adv.next_order(k) {
                let occupied = VertexSet::from_vertices(n, positions.iter().copied());
                let from = positions[robot];
                let task = algo.classify(g, &occupied)?;
                let perm = adv.relabeling(n);
                if let Some(to) = decide_through(g, &occupied, from, algo, &perm)? {
                    return Err(SimError::UnstableFinal { round: rounds.len(), robot, from, to });
                }
                rounds.push(RoundRecord {
                    epoch: stability_epoch,
                    round: rounds.len(),
                    robot,
                    observed: occupied.to_vec(),
                    task,
                    from,
                    to: from,
                });
            }
            (Outcome::Gathered, stability_epoch, rounds.len() - before, Some(positions[0]))
        }
        None => (Outcome::EpochCapExceeded, max_epochs, 0, None),
    };

    Ok(ExecutionTrace {
        schema: TRACE_SCHEMA.to_string(),
        algorithm: algo.name().to_string(),
        seed: opts.seed,
        rng: RNG_NAME.to_string(),
        adversary: opts.mode,
        max_epochs,
        robots: k,
        initial_placement: p0.0.clone(),
        initial_occ: start.occ(),
        initial_delta: start.delta(g),
        rounds,
        outcome,
        epochs,
        stability_rounds,
        final_vertex,
        equivariance: eq,
    })
}

/// Tie-breaking ranks exposed for harnesses that replay decisions.
pub fn view_rank(g: &Graph, occupied: &VertexSet, own: Vertex) -> Vec<usize> {
    state_rank(g, occupied, Some(own))
}
