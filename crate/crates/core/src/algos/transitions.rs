//! Conformance of execution traces: task transitions against the
//! algorithms' transition graph, plus the per-round invariants that the
//! correctness arguments rely on.

use serde::Serialize;

use crate::analysis::smallest_terminal_orbit;
use crate::error::AlgoError;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::sim::{AdversaryMode, ExecutionTrace};

use super::nonterminal::{context_of, Layout};
use super::{analysis_err, TaskId};

use TaskId::*;

/// Whether the transition graph contains the edge `from -> to`. Staying in
/// the same task is always allowed.
pub fn allowed(from: TaskId, to: TaskId) -> bool {
    if from == to {
        return true;
    }
    let is_t2 = matches!(to, T2i | T2ii | T2iii | T2iv);
    let is_t3 = matches!(to, T3i | T3ii | T3iii);
    match from {
        T1 => is_t2 || is_t3 || to == T4,
        T2i => to == T2ii,
        T2ii => matches!(to, T2iii | T2iv) || is_t3,
        T2iii => matches!(to, T2ii | T2iv | T4) || is_t3,
        T2iv => matches!(to, T2iii | T3i | T3ii | T4),
        T3i => matches!(to, T2iii | T2iv | T3ii | T4),
        T3ii => to == T3i,
        T3iii => to == T3ii,
        T4 => to == Final,
        AtT1 | AtT3 => to == AtT2,
        AtT2 => to == Final,
        Final => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Round whose label is `to`.
    pub round: usize,
    pub from: TaskId,
    pub to: TaskId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    /// Changes of task label seen in the trace.
    pub transitions: usize,
    pub violations: Vec<Violation>,
}

impl ConformanceReport {
    pub fn is_conformant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every change of task label in `labels` (one per round).
pub fn check_labels(labels: impl IntoIterator<Item = (usize, TaskId)>) -> ConformanceReport {
    let mut report = ConformanceReport::default();
    let mut prev: Option<TaskId> = None;
    for (round, task) in labels {
        if let Some(from) = prev.filter(|&p| p != task) {
            report.transitions += 1;
            if !allowed(from, task) {
                report.violations.push(Violation { round, from, to: task });
            }
        }
        prev = Some(task);
    }
    report
}

pub fn transition_check(trace: &ExecutionTrace) -> ConformanceReport {
    check_labels(trace.rounds.iter().map(|r| (r.round, r.task)))
}

/// A rear vertex designated by consecutive trickle configurations. The
/// episode lasts while the vertex stays a rear and still holds robots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrickleEpisode {
    pub rear: Vertex,
    pub start_round: usize,
    pub start_count: usize,
    /// Last round of the episode.
    pub end_round: usize,
    /// Whether the rear was empty when the episode ended.
    pub emptied: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    /// Task 2.ii/2.iii rounds checked for the robot count in `CC`.
    pub monotone_b_checked: usize,
    pub monotone_b_violations: Vec<usize>,
    pub trickle_episodes: Vec<TrickleEpisode>,
    /// AT.T2 activations of robots not yet on the target vertex.
    pub progress_checked: usize,
    pub progress_violations: Vec<usize>,
}

impl InvariantReport {
    pub fn trickle_violations(&self) -> usize {
        self.trickle_episodes.iter().filter(|e| !e.ok).count()
    }

    pub fn holds(&self) -> bool {
        self.monotone_b_violations.is_empty() && self.trickle_violations() == 0 && self.progress_violations.is_empty()
    }
}

struct OpenEpisode {
    rear: Vertex,
    start_round: usize,
    start_epoch: usize,
    start_count: usize,
    last_round: usize,
    last_epoch: usize,
    monotone: bool,
}

impl OpenEpisode {
    fn close(self, k: usize, mode: AdversaryMode, emptied: bool) -> TrickleEpisode {
        let in_time = match mode {
            AdversaryMode::Fixed => self.last_round + 1 - self.start_round <= k,
            AdversaryMode::PerEpoch => self.last_epoch <= self.start_epoch + 1,
        };
        TrickleEpisode {
            rear: self.rear,
            start_round: self.start_round,
            start_count: self.start_count,
            end_round: self.last_round,
            emptied,
            ok: self.monotone && in_time,
        }
    }
}

/// Replays `trace` on `g` and checks the invariants of the algorithm that
/// produced it.
pub fn check_invariants(g: &Graph, trace: &ExecutionTrace) -> Result<InvariantReport, AlgoError> {
    let placements = trace.placements();
    let rounds = trace.active_rounds();
    let mut report = InvariantReport::default();
    let terminal = smallest_terminal_orbit(g).map_err(analysis_err)?;

    if let Some(o) = terminal {
        for (i, r) in rounds.iter().enumerate() {
            if r.task != AtT2 {
                continue;
            }
            let observed = VertexSet::from_vertices(g.n(), r.observed.iter().copied());
            let v = observed.intersection(&o).first().expect("AT.T2 has one occupied vertex of O");
            if r.from == v {
                continue;
            }
            report.progress_checked += 1;
            let mut allowed = o.complement();
            allowed.insert(v);
            let d = g.bfs_within(v, Some(&allowed));
            let closer = match (d[r.from], d[r.to]) {
                (Some(a), Some(b)) => b < a,
                _ => false,
            };
            if !closer {
                report.progress_violations.push(i);
            }
        }
        return Ok(report);
    }

    let lay = Layout::new(g)?;
    let (k, mode) = (trace.robots, trace.adversary);
    let mut open: Vec<OpenEpisode> = Vec::new();
    for (i, r) in rounds.iter().enumerate() {
        let observed = VertexSet::from_vertices(g.n(), r.observed.iter().copied());
        let ctx = context_of(g, &lay, &observed)?;
        let before = &placements[i];
        let after = &placements[i + 1];

        if matches!(ctx.task, T2ii | T2iii) {
            let cc = &lay.comps[ctx.cc.expect("task 2 sets CC")];
            report.monotone_b_checked += 1;
            if after.count_in(cc) < before.count_in(cc) {
                report.monotone_b_violations.push(i);
            }
        }

        let rears = ctx.rears();
        let (keep, done): (Vec<_>, Vec<_>) =
            open.drain(..).partition(|e| rears.contains(&e.rear) && before.count_on(e.rear) > 0);
        for e in done {
            let emptied = before.count_on(e.rear) == 0;
            report.trickle_episodes.push(e.close(k, mode, emptied));
        }
        open = keep;
        for &rear in &rears {
            let count = before.count_on(rear);
            if count > 0 && !open.iter().any(|e| e.rear == rear) {
                open.push(OpenEpisode {
                    rear,
                    start_round: i,
                    start_epoch: r.epoch,
                    start_count: count,
                    last_round: i,
                    last_epoch: r.epoch,
                    monotone: true,
                });
            }
        }
        for e in open.iter_mut() {
            e.monotone &= after.count_on(e.rear) <= before.count_on(e.rear);
            e.last_round = i;
            e.last_epoch = r.epoch;
        }
    }
    let last = placements.get(rounds.len()).cloned();
    for e in open {
        let emptied = last.as_ref().is_some_and(|p| p.count_on(e.rear) == 0);
        report.trickle_episodes.push(e.close(k, mode, emptied));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(ts: &[TaskId]) -> Vec<(usize, TaskId)> {
        ts.iter().copied().enumerate().collect()
    }

    #[test]
    fn table_edges() {
        assert!(allowed(T1, T2iv));
        assert!(allowed(T1, T3iii));
        assert!(allowed(T2ii, T3i));
        assert!(allowed(T3i, T4));
        assert!(allowed(T4, Final));
        assert!(allowed(AtT1, AtT2));
        assert!(!allowed(T2i, T4));
        assert!(!allowed(T3ii, T3iii));
        assert!(!allowed(T2ii, T4));
        assert!(!allowed(T2iv, T2ii));
        assert!(!allowed(T2iii, T1));
        assert!(!allowed(AtT2, AtT1));
        assert!(!allowed(Final, T1));
    }

    #[test]
    fn flags_t2i_to_t4_with_round() {
        let r = check_labels(labels(&[T1, T1, T2i, T4, Final]));
        assert_eq!(r.transitions, 3);
        assert_eq!(r.violations, vec![Violation { round: 3, from: T2i, to: T4 }]);
    }

    #[test]
    fn final_without_t4_is_flagged() {
        let r = check_labels(labels(&[T2ii, T2iii, Final]));
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].to, Final);
    }

    #[test]
    fn conformant_run() {
        let r = check_labels(labels(&[T1, T2i, T2ii, T2ii, T2iii, T2iv, T2iv, T3i, T4, T4, Final, Final]));
        assert!(r.is_conformant());
        assert_eq!(r.transitions, 7);
    }
}
