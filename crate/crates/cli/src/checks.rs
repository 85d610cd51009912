//! Pass/fail checks on a finished run.

use anyhow::Result;
use gather_core::algos::transitions::{check_invariants, transition_check, ConformanceReport, InvariantReport};
use gather_core::analysis::{avoiding_radius, smallest_terminal_orbit};
use gather_core::sim::{ExecutionTrace, Outcome};
use gather_core::Graph;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Bound {
    pub bound: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunChecks {
    pub gathered: bool,
    /// `epochs >= ceil(delta(C0) / 2)`.
    pub lower_bound: Bound,
    /// `2 + B(G, O)` for the terminal algorithm, the epoch cap otherwise.
    pub upper_bound: Bound,
    pub conformance: ConformanceReport,
    pub invariants: InvariantReport,
}

impl RunChecks {
    pub fn passed(&self) -> bool {
        self.gathered
            && self.lower_bound.ok
            && self.upper_bound.ok
            && self.conformance.is_conformant()
            && self.invariants.holds()
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.gathered {
            out.push("gathered");
        }
        if !self.lower_bound.ok {
            out.push("lower-bound");
        }
        if !self.upper_bound.ok {
            out.push("upper-bound");
        }
        if !self.conformance.is_conformant() {
            out.push("transitions");
        }
        if !self.invariants.monotone_b_violations.is_empty() {
            out.push("monotone-b");
        }
        if self.invariants.trickle_violations() > 0 {
            out.push("trickle");
        }
        if !self.invariants.progress_violations.is_empty() {
            out.push("progress");
        }
        out
    }
}

pub fn evaluate(g: &Graph, trace: &ExecutionTrace) -> Result<RunChecks> {
    let gathered = trace.outcome == Outcome::Gathered;
    let lower = trace.initial_delta.div_ceil(2);
    let upper = if trace.algorithm == "terminal" {
        smallest_terminal_orbit(g)?.and_then(|o| avoiding_radius(g, &o)).map(|b| b + 2)
    } else {
        Some(trace.max_epochs)
    };
    Ok(RunChecks {
        gathered,
        lower_bound: Bound { bound: Some(lower), ok: !gathered || trace.epochs >= lower },
        upper_bound: Bound { bound: upper, ok: upper.is_some_and(|u| trace.epochs <= u) },
        conformance: transition_check(trace),
        invariants: check_invariants(g, trace)?,
    })
}

pub fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

pub fn summary_line(trace: &ExecutionTrace, checks: &RunChecks) -> String {
    let outcome = match trace.outcome {
        Outcome::Gathered => "gathered",
        Outcome::EpochCapExceeded => "epoch-cap-exceeded",
    };
    let bound = |b: &Bound| b.bound.map_or("?".to_string(), |v| v.to_string());
    format!(
        "{outcome} algorithm={} epochs={} delta={} occ={} robots={} lower(>={})={} upper(<={})={} transitions={} invariants={}",
        trace.algorithm,
        trace.epochs,
        trace.initial_delta,
        trace.initial_occ,
        trace.robots,
        bound(&checks.lower_bound),
        mark(checks.lower_bound.ok),
        bound(&checks.upper_bound),
        mark(checks.upper_bound.ok),
        mark(checks.conformance.is_conformant()),
        mark(checks.invariants.holds()),
    )
}
