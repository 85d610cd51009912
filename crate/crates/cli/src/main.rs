//! `gather`: analysis, graph generation, simulation and batch sweeps.
//!
//! Exit codes: 0 when every check passes, 1 on an invariant violation or a
//! run that did not gather, 2 on bad input.

mod batch;
mod checks;
mod manifest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gather_core::algos::transitions::{check_invariants, transition_check};
use gather_core::algos::{select, AlgoChoice};
use gather_core::analysis::analyze;
use gather_core::generators::FamilySpec;
use gather_core::sim::{run, AdversaryMode, ExecutionTrace, Placement, RunOptions, TRACE_SCHEMA};
use gather_core::{Graph, SimError, Vertex};
use serde::Serialize;

use batch::Suite;
use checks::{evaluate, mark, summary_line};
use manifest::{read_graph, GraphSource, RunDocument, RunManifest, SavedRun, MANIFEST_SCHEMA, RUN_SCHEMA, TOOL_VERSION};

const ANALYSIS_SCHEMA: &str = "gather-analysis/1";
const OUT_DIR_ENV: &str = "GATHER_OUT_DIR";

#[derive(Parser)]
#[command(name = "gather", version, about = "Gathering of oblivious robots on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph in the text format (`n`, then one `u v` edge per line).
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Generated graph, e.g. `--family butterfly 2`.
    #[arg(long, num_args = 1.., value_name = "NAME PARAMS")]
    family: Option<Vec<String>>,
    /// Seed for the random families.
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
}

impl GraphArgs {
    fn source(&self, positional: Option<&PathBuf>) -> Result<Option<GraphSource>> {
        let file = match (positional, &self.graph) {
            (Some(_), Some(_)) => bail!("give the graph file once"),
            (p, g) => p.or(g.as_ref()),
        };
        Ok(match (file, &self.family) {
            (Some(_), Some(_)) => bail!("give either a graph file or --family, not both"),
            (Some(path), None) => Some(GraphSource::File { path: path.clone() }),
            (None, Some(words)) => {
                let (name, params) = words.split_first().ok_or_else(|| anyhow!("--family needs a name"))?;
                Some(GraphSource::Family { spec: FamilySpec::from_args(name, params)?, seed: self.graph_seed })
            }
            (None, None) => None,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Orbits, terminal orbits and the structural predicates of a graph.
    Analyze {
        /// Graph file.
        file: Option<PathBuf>,
        #[command(flatten)]
        graph: GraphArgs,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Writes a generated graph in the text format.
    Generate {
        /// Family name, e.g. `star`, `butterfly`, `h-family`, `random-tree`.
        family: String,
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs one simulation from a manifest or from flags and saves the trace.
    Simulate(SimulateArgs),
    /// Runs a suite of analyses and simulations and writes a report.
    Batch {
        suite: PathBuf,
        /// Run simulations on all cores.
        #[arg(long)]
        parallel: bool,
        /// Report file; defaults to `<out-dir>/<suite>.report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Checks the task transitions (and, given the graph, the run
    /// invariants) of a saved trace.
    CheckTrace {
        trace: PathBuf,
        /// Graph file, for bare traces that do not embed one.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Run manifest (JSON). Without one the run is described by flags.
    manifest: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    /// Robot positions, e.g. `1,2,2`.
    #[arg(long, value_delimiter = ',')]
    placement: Vec<Vertex>,
    #[arg(long, default_value = "auto")]
    algorithm: AlgoChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fixed")]
    adversary: AdversaryMode,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Evaluate every decision under two relabelings.
    #[arg(long)]
    double_eval: bool,
    /// Also save the manifest built from the flags.
    #[arg(long, value_name = "FILE")]
    write_manifest: Option<PathBuf>,
    /// Trace file; defaults to `<out-dir>/<manifest>.trace.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,
}

enum Status {
    Pass,
    Violation,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_analyze(file: Option<PathBuf>, args: GraphArgs, json: bool) -> Result<Status> {
    let source = args.source(file.as_ref())?.ok_or_else(|| anyhow!("no graph given (file or --family)"))?;
    let g = source.load(None)?;
    let report = analyze(&g)?;
    if json {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'static str,
            source: &'a GraphSource,
            report: &'a gather_core::analysis::TerminalReport,
        }
        let doc = Doc { schema: ANALYSIS_SCHEMA, source: &source, report: &report };
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(Status::Pass);
    }
    println!(
        "graph {}: n={} edges={} diameter={} vertex-transitive={}",
        source.describe(),
        report.n,
        report.edges,
        report.diameter,
        yes_no(report.vertex_transitive)
    );
    println!("certificate {}", report.certificate);
    for o in &report.orbits {
        let terminal = match (o.terminal, &o.witness) {
            (None, _) => "skipped".to_string(),
            (Some(true), _) => "yes".to_string(),
            (Some(false), Some(w)) => format!("no ({} cannot reach {} avoiding the orbit)", w.u, w.v),
            (Some(false), None) => "no".to_string(),
        };
        println!("orbit {} size={} min-label={} terminal={terminal} {:?}", o.index, o.vertices.len(), o.min_label, o.vertices);
    }
    let p = &report.predicates;
    println!(
        "predicates: universal={} cut-vertex={} twin-orbit={} connected-proper-orbit-subset={}",
        yes_no(p.has_universal),
        yes_no(p.has_cut_vertex),
        yes_no(p.has_twin_orbit),
        yes_no(p.has_connected_proper_orbit_subset)
    );
    if report.vertex_transitive {
        println!("vertex-transitive: terminal orbit analysis skipped");
    } else {
        match report.smallest_terminal {
            Some(i) => println!("smallest terminal orbit: {i}"),
            None => println!("no terminal orbit"),
        }
    }
    Ok(Status::Pass)
}

fn cmd_generate(family: String, params: Vec<String>, seed: u64, out: Option<PathBuf>) -> Result<Status> {
    let spec = FamilySpec::from_args(&family, &params)?;
    let g = spec.build(seed)?;
    let text = format!("# {}\n{}", GraphSource::Family { spec, seed }.describe(), g.to_text());
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(Status::Pass)
}

fn cmd_simulate(args: SimulateArgs) -> Result<Status> {
    let (m, base, stem) = match &args.manifest {
        Some(path) => {
            if args.graph.source(None)?.is_some() || !args.placement.is_empty() {
                bail!("a manifest replaces --graph/--family/--placement");
            }
            let m = RunManifest::read(path)?;
            let stem = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            (m, path.parent().map(Path::to_path_buf), stem)
        }
        None => {
            let graph = args.graph.source(None)?.ok_or_else(|| anyhow!("no manifest, --graph or --family given"))?;
            if args.placement.is_empty() {
                bail!("--placement is required without a manifest");
            }
            let m = RunManifest {
                schema: MANIFEST_SCHEMA.into(),
                tool_version: TOOL_VERSION.into(),
                graph,
                placement: args.placement.clone(),
                algorithm: args.algorithm,
                seed: args.seed,
                adversary: args.adversary,
                max_epochs: args.max_epochs,
                double_eval: args.double_eval,
            };
            if let Some(path) = &args.write_manifest {
                write_json(path, &m)?;
            }
            (m, None, format!("run-{}", args.seed))
        }
    };
    if m.tool_version != TOOL_VERSION {
        eprintln!("warning: manifest written by version {}, running {TOOL_VERSION}", m.tool_version);
    }

    let g = m.graph.load(base.as_deref())?;
    let algo = select(&g, m.algorithm)?;
    let p = Placement(m.placement.clone());
    let opts = RunOptions { max_epochs: m.max_epochs, double_eval: m.double_eval, ..RunOptions::new(m.seed, m.adversary) };
    let trace = match run(&g, &p, algo.as_ref(), opts) {
        Ok(t) => t,
        Err(
            e @ (SimError::Graph(_)
            | SimError::EmptyPlacement
            | SimError::InvalidPlacement { .. }
            | SimError::ZeroEpochCap),
        ) => return Err(e.into()),
        Err(e) => {
            println!("violation: {e}");
            return Ok(Status::Violation);
        }
    };
    let checks = evaluate(&g, &trace)?;
    let out = args.out.unwrap_or_else(|| args.out_dir.join(format!("{stem}.trace.json")));
    let doc = RunDocument { schema: RUN_SCHEMA, manifest: &m, graph: g.to_text(), checks: &checks, trace: &trace };
    write_json(&out, &doc)?;
    println!("{} trace={}", summary_line(&trace, &checks), out.display());
    for v in &checks.conformance.violations {
        println!("  round {}: {} -> {} is not a transition of the algorithm", v.round, v.from, v.to);
    }
    Ok(if checks.passed() { Status::Pass } else { Status::Violation })
}

fn cmd_batch(suite_path: PathBuf, parallel: bool, out: Option<PathBuf>, out_dir: PathBuf) -> Result<Status> {
    let suite = Suite::read(&suite_path)?;
    let stdout = Mutex::new(io::stdout());
    let report = batch::run_suite(&suite, suite_path.parent(), parallel, &stdout)?;
    let stem = suite_path.file_stem().map_or("suite".into(), |s| s.to_string_lossy().into_owned());
    let out = out.unwrap_or_else(|| out_dir.join(format!("{stem}.report.json")));
    write_json(&out, &report)?;

    let a = &report.aggregate;
    let analyses_ok = report.analyses.iter().filter(|r| r.passed).count();
    println!("analyses: {analyses_ok}/{} passed", report.analyses.len());
    println!("runs: {}/{} passed", a.passed, a.runs);
    if let (Some(lo), Some(mean), Some(hi)) = (a.epochs_min, a.epochs_mean, a.epochs_max) {
        println!("epochs: min {lo} mean {mean:.2} max {hi}");
    }
    let ratio = |r: Option<f64>| r.map_or("-".to_string(), |x| format!("{x:.3}"));
    println!(
        "max epochs per delta {} per occ {} per |V| {} per diam {}",
        ratio(a.max_epochs_per_delta),
        ratio(a.max_epochs_per_occ),
        ratio(a.max_epochs_per_n),
        ratio(a.max_epochs_per_diameter)
    );
    if let Some(fit) = &a.fit {
        println!("epochs ~ {:.4} * (occ*delta + |V|) + {:.3}", fit.slope, fit.intercept);
    }
    println!("report={}", out.display());
    Ok(if report.passed { Status::Pass } else { Status::Violation })
}

fn cmd_check_trace(path: PathBuf, graph: Option<PathBuf>, json: bool) -> Result<Status> {
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (trace, embedded): (ExecutionTrace, Option<String>) = match value.get("schema").and_then(|s| s.as_str()) {
        Some(RUN_SCHEMA) => {
            let saved: SavedRun = serde_json::from_value(value).context("reading saved run")?;
            (saved.trace, saved.graph)
        }
        Some(TRACE_SCHEMA) => (serde_json::from_value(value).context("reading trace")?, None),
        other => bail!("{}: unknown schema {other:?}", path.display()),
    };
    let g: Option<Graph> = match (graph, embedded) {
        (Some(file), _) => Some(read_graph(&file)?),
        (None, Some(text)) => Some(text.parse().context("parsing embedded graph")?),
        (None, None) => None,
    };
    let conformance = transition_check(&trace);
    let invariants = match &g {
        Some(g) => {
            if trace.initial_placement.iter().chain(trace.rounds.iter().map(|r| &r.to)).any(|&v| v >= g.n()) {
                bail!("trace does not fit a graph on {} vertices", g.n());
            }
            Some(check_invariants(g, &trace)?)
        }
        None => None,
    };
    let ok = conformance.is_conformant() && invariants.as_ref().is_none_or(|r| r.holds());
    if json {
        #[derive(Serialize)]
        struct Doc<'a> {
            conformance: &'a gather_core::algos::transitions::ConformanceReport,
            invariants: Option<&'a gather_core::algos::transitions::InvariantReport>,
            passed: bool,
        }
        let doc = Doc { conformance: &conformance, invariants: invariants.as_ref(), passed: ok };
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!(
            "transitions={} violations={} rounds={}",
            conformance.transitions,
            conformance.violations.len(),
            trace.rounds.len()
        );
        for v in &conformance.violations {
            println!("  round {}: {} -> {}", v.round, v.from, v.to);
        }
        match &invariants {
            Some(r) => println!(
                "monotone-b {} ({} checked) trickle {} ({} episodes) progress {} ({} checked)",
                mark(r.monotone_b_violations.is_empty()),
                r.monotone_b_checked,
                mark(r.trickle_violations() == 0),
                r.trickle_episodes.len(),
                mark(r.progress_violations.is_empty()),
                r.progress_checked
            ),
            None => println!("invariants not checked (no graph)"),
        }
        println!("{}", if ok { "PASS" } else { "FAIL" });
    }
    Ok(if ok { Status::Pass } else { Status::Violation })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { file, graph, json } => cmd_analyze(file, graph, json),
        Command::Generate { family, params, seed, out } => cmd_generate(family, params, seed, out),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Batch { suite, parallel, out, out_dir } => cmd_batch(suite, parallel, out, out_dir),
        Command::CheckTrace { trace, graph, json } => cmd_check_trace(trace, graph, json),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
