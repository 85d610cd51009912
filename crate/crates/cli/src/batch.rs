//! Suites of analyses and runs, executed in one go.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use gather_core::algos::transitions::Violation;
use gather_core::algos::{select, AlgoChoice, Algorithm};
use gather_core::analysis::analyze;
use gather_core::generators::rng;
use gather_core::sim::{run, AdversaryMode, Configuration, Placement, RunOptions};
use gather_core::{Graph, Vertex};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::evaluate;
use crate::manifest::{GraphSource, TOOL_VERSION};

pub const SUITE_SCHEMA: &str = "gather-suite/1";
pub const REPORT_SCHEMA: &str = "gather-batch/1";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub schema: String,
    /// Source of every seed the suite does not list explicitly.
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub analyses: Vec<AnalysisCase>,
    #[serde(default)]
    pub runs: Vec<RunGroup>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisCase {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSource,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub orbits: Option<usize>,
    /// Number of terminal orbits.
    pub terminal: Option<usize>,
    pub vertex_transitive: Option<bool>,
}

fn auto() -> AlgoChoice {
    AlgoChoice::Auto
}

fn five() -> usize {
    5
}

fn both_modes() -> Vec<AdversaryMode> {
    vec![AdversaryMode::Fixed, AdversaryMode::PerEpoch]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunGroup {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSource,
    #[serde(default = "auto")]
    pub algorithm: AlgoChoice,
    #[serde(default)]
    pub placements: Vec<Vec<Vertex>>,
    #[serde(default)]
    pub random_placements: Option<RandomPlacements>,
    /// Explicit adversary seeds; otherwise `seed_count` are drawn from the
    /// master seed.
    #[serde(default)]
    pub adversary_seeds: Option<Vec<u64>>,
    #[serde(default = "five")]
    pub seed_count: usize,
    #[serde(default = "both_modes")]
    pub modes: Vec<AdversaryMode>,
    #[serde(default)]
    pub max_epochs: Option<usize>,
    #[serde(default)]
    pub double_eval: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPlacements {
    pub count: usize,
    pub robots: usize,
    /// Put the second robot on the first one's vertex.
    #[serde(default)]
    pub stack: bool,
}

impl Suite {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let s: Suite = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if s.schema != SUITE_SCHEMA {
            bail!("{}: unsupported schema {:?} (expected {SUITE_SCHEMA})", path.display(), s.schema);
        }
        Ok(s)
    }
}

#[derive(Serialize)]
pub struct AnalysisRecord {
    pub name: String,
    pub n: usize,
    pub orbits: usize,
    pub terminal_orbits: usize,
    pub vertex_transitive: bool,
    pub predicates_any: bool,
    /// A predicate holding on a non-vertex-transitive graph implies a
    /// terminal orbit.
    pub predicate_implication: bool,
    pub expectations_met: bool,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct RunRecord {
    pub group: String,
    pub placement: Vec<Vertex>,
    pub seed: u64,
    pub adversary: AdversaryMode,
    pub algorithm: String,
    pub n: usize,
    pub diameter: usize,
    pub delta: usize,
    pub occ: usize,
    pub epochs: Option<usize>,
    pub gathered: bool,
    pub failures: Vec<String>,
    pub table_violations: Vec<Violation>,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Serialize)]
pub struct Aggregate {
    pub runs: usize,
    pub passed: usize,
    pub failed: usize,
    pub epochs_min: Option<usize>,
    pub epochs_mean: Option<f64>,
    pub epochs_max: Option<usize>,
    pub max_epochs_per_delta: Option<f64>,
    pub max_epochs_per_occ: Option<f64>,
    pub max_epochs_per_n: Option<f64>,
    pub max_epochs_per_diameter: Option<f64>,
    /// Least squares of epochs against `occ * delta + |V|`.
    pub fit: Option<Fit>,
}

#[derive(Serialize)]
pub struct BatchReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub master_seed: u64,
    pub analyses: Vec<AnalysisRecord>,
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
    pub passed: bool,
}

fn check_analysis(name: String, g: &Graph, expect: &Expect) -> Result<AnalysisRecord> {
    let r = analyze(g)?;
    let terminal = r.orbits.iter().filter(|o| o.terminal == Some(true)).count();
    let implication = r.vertex_transitive || !r.predicates.any() || r.smallest_terminal.is_some();
    let met = expect.orbits.is_none_or(|k| k == r.orbits.len())
        && expect.terminal.is_none_or(|k| k == terminal)
        && expect.vertex_transitive.is_none_or(|b| b == r.vertex_transitive);
    Ok(AnalysisRecord {
        name,
        n: r.n,
        orbits: r.orbits.len(),
        terminal_orbits: terminal,
        vertex_transitive: r.vertex_transitive,
        predicates_any: r.predicates.any(),
        predicate_implication: implication,
        expectations_met: met,
        passed: implication && met,
    })
}

struct Job {
    group: usize,
    placement: Vec<Vertex>,
    seed: u64,
    mode: AdversaryMode,
}

struct Prepared {
    name: String,
    graph: Graph,
    diameter: usize,
    algo: Box<dyn Algorithm>,
    max_epochs: Option<usize>,
    double_eval: bool,
}

fn random_placement(g: &Graph, spec: &RandomPlacements, r: &mut impl Rng) -> Vec<Vertex> {
    let mut p: Vec<Vertex> = (0..spec.robots).map(|_| r.gen_range(0..g.n())).collect();
    if spec.stack && p.len() >= 2 {
        p[1] = p[0];
    }
    p
}

/// Loads every graph and expands the groups into jobs. Seeds are fixed
/// here, so the jobs do not depend on how they are later scheduled.
fn prepare(suite: &Suite, base: Option<&Path>) -> Result<(Vec<Prepared>, Vec<Job>)> {
    let mut groups = Vec::new();
    let mut jobs = Vec::new();
    for (gi, group) in suite.runs.iter().enumerate() {
        let name = group.name.clone().unwrap_or_else(|| group.graph.describe());
        let graph = group.graph.load(base).with_context(|| format!("run group {name}"))?;
        let algo = select(&graph, group.algorithm).with_context(|| format!("run group {name}"))?;
        let mut r = rng(suite.master_seed);
        r.set_stream(gi as u64 + 1);

        let mut placements = group.placements.clone();
        if let Some(spec) = &group.random_placements {
            if spec.robots == 0 {
                bail!("run group {name}: random placements need at least one robot");
            }
            placements.extend((0..spec.count).map(|_| random_placement(&graph, spec, &mut r)));
        }
        if placements.is_empty() {
            bail!("run group {name}: no placements");
        }
        for p in &placements {
            Placement(p.clone()).validate(&graph).with_context(|| format!("run group {name}: placement {p:?}"))?;
        }
        let seeds = match &group.adversary_seeds {
            Some(s) => s.clone(),
            None => (0..group.seed_count).map(|_| r.gen()).collect(),
        };
        for p in &placements {
            for &seed in &seeds {
                for &mode in &group.modes {
                    jobs.push(Job { group: gi, placement: p.clone(), seed, mode });
                }
            }
        }
        groups.push(Prepared {
            name,
            diameter: graph.diameter()?,
            graph,
            algo,
            max_epochs: group.max_epochs,
            double_eval: group.double_eval,
        });
    }
    Ok((groups, jobs))
}

fn execute(group: &Prepared, job: &Job) -> RunRecord {
    let g = &group.graph;
    let p = Placement(job.placement.clone());
    let c0 = Configuration::snapshot(&p, g);
    let mut rec = RunRecord {
        group: group.name.clone(),
        placement: job.placement.clone(),
        seed: job.seed,
        adversary: job.mode,
        algorithm: group.algo.name().to_string(),
        n: g.n(),
        diameter: group.diameter,
        delta: c0.delta(g),
        occ: c0.occ(),
        epochs: None,
        gathered: false,
        failures: Vec::new(),
        table_violations: Vec::new(),
        passed: false,
    };
    let opts = RunOptions { max_epochs: group.max_epochs, double_eval: group.double_eval, ..RunOptions::new(job.seed, job.mode) };
    let trace = match run(g, &p, group.algo.as_ref(), opts) {
        Ok(t) => t,
        Err(e) => {
            rec.failures.push(format!("error: {e}"));
            return rec;
        }
    };
    rec.epochs = Some(trace.epochs);
    rec.gathered = trace.gathered();
    match evaluate(g, &trace) {
        Ok(checks) => {
            rec.failures = checks.failures().into_iter().map(String::from).collect();
            rec.table_violations = checks.conformance.violations;
        }
        Err(e) => rec.failures.push(format!("error: {e}")),
    }
    rec.passed = rec.failures.is_empty();
    rec
}

fn max_ratio(runs: &[&RunRecord], den: impl Fn(&RunRecord) -> usize) -> Option<f64> {
    runs.iter()
        .filter(|r| den(r) > 0)
        .map(|r| r.epochs.unwrap_or(0) as f64 / den(r) as f64)
        .max_by(f64::total_cmp)
}

fn aggregate(runs: &[RunRecord]) -> Aggregate {
    let passed = runs.iter().filter(|r| r.passed).count();
    let done: Vec<&RunRecord> = runs.iter().filter(|r| r.gathered).collect();
    let epochs: Vec<usize> = done.iter().filter_map(|r| r.epochs).collect();
    let mean = (!epochs.is_empty()).then(|| epochs.iter().sum::<usize>() as f64 / epochs.len() as f64);

    let pts: Vec<(f64, f64)> =
        done.iter().map(|r| ((r.occ * r.delta + r.n) as f64, r.epochs.unwrap_or(0) as f64)).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let fit = (pts.len() >= 2 && sxx > 0.0).then(|| {
        let slope = sxy / sxx;
        Fit { slope, intercept: my - slope * mx }
    });

    Aggregate {
        runs: runs.len(),
        passed,
        failed: runs.len() - passed,
        epochs_min: epochs.iter().copied().min(),
        epochs_mean: mean,
        epochs_max: epochs.iter().copied().max(),
        max_epochs_per_delta: max_ratio(&done, |r| r.delta),
        max_epochs_per_occ: max_ratio(&done, |r| r.occ),
        max_epochs_per_n: max_ratio(&done, |r| r.n),
        max_epochs_per_diameter: max_ratio(&done, |r| r.diameter),
        fit,
    }
}

fn run_line(i: usize, r: &RunRecord) -> String {
    let verdict = if r.passed { "PASS".to_string() } else { format!("FAIL ({})", r.failures.join(", ")) };
    let epochs = r.epochs.map_or("-".to_string(), |e| e.to_string());
    format!(
        "run {i}: {} {:?} seed={} {:?} epochs={epochs} delta={} occ={} {verdict}",
        r.group, r.placement, r.seed, r.adversary, r.delta, r.occ
    )
}

/// Runs `suite`. Progress lines go to `out` as runs finish; the returned
/// report lists runs in suite order whatever the scheduling.
pub fn run_suite(suite: &Suite, base: Option<&Path>, parallel: bool, out: &Mutex<impl Write + Send>) -> Result<BatchReport> {
    let mut analyses = Vec::new();
    for case in &suite.analyses {
        let name = case.name.clone().unwrap_or_else(|| case.graph.describe());
        let g = case.graph.load(base).with_context(|| format!("analysis {name}"))?;
        let rec = check_analysis(name, &g, &case.expect)?;
        let verdict = if rec.passed { "PASS" } else { "FAIL" };
        writeln!(
            out.lock().unwrap(),
            "analysis {}: orbits={} terminal={} vertex-transitive={} implication={} expectations={} {verdict}",
            rec.name,
            rec.orbits,
            rec.terminal_orbits,
            rec.vertex_transitive,
            rec.predicate_implication,
            rec.expectations_met
        )?;
        analyses.push(rec);
    }

    let (groups, jobs) = prepare(suite, base)?;
    let work = |(i, job): (usize, &Job)| {
        let rec = execute(&groups[job.group], job);
        // a failed write to the progress stream must not abort the run
        let _ = writeln!(out.lock().unwrap(), "{}", run_line(i, &rec));
        rec
    };
    let runs: Vec<RunRecord> = if parallel {
        jobs.par_iter().enumerate().map(work).collect()
    } else {
        jobs.iter().enumerate().map(work).collect()
    };

    let aggregate = aggregate(&runs);
    let passed = analyses.iter().all(|a| a.passed) && runs.iter().all(|r| r.passed);
    Ok(BatchReport {
        schema: REPORT_SCHEMA,
        tool_version: TOOL_VERSION,
        master_seed: suite.master_seed,
        analyses,
        runs,
        aggregate,
        passed,
    })
}
