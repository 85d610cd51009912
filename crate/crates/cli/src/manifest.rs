//! Run manifests and the documents written by `simulate`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gather_core::algos::AlgoChoice;
use gather_core::generators::FamilySpec;
use gather_core::sim::{AdversaryMode, ExecutionTrace};
use gather_core::{Graph, Vertex};
use serde::{Deserialize, Serialize};

use crate::checks::RunChecks;

pub const MANIFEST_SCHEMA: &str = "gather-manifest/1";
pub const RUN_SCHEMA: &str = "gather-run/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a graph comes from. File paths are resolved against the directory
/// of the manifest or suite that names them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSource {
    File {
        path: PathBuf,
    },
    Family {
        spec: FamilySpec,
        /// Only read by the random families.
        #[serde(default)]
        seed: u64,
    },
    Inline {
        text: String,
    },
}

impl GraphSource {
    pub fn load(&self, base: Option<&Path>) -> Result<Graph> {
        let g = match self {
            GraphSource::File { path } => {
                let full = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                read_graph(&full)?
            }
            GraphSource::Family { spec, seed } => spec.build(*seed).with_context(|| format!("building {spec}"))?,
            GraphSource::Inline { text } => text.parse().context("parsing inline graph")?,
        };
        g.require_connected()?;
        Ok(g)
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::File { path } => path.display().to_string(),
            GraphSource::Family { spec, seed } if spec.is_random() => format!("{spec}#{seed}"),
            GraphSource::Family { spec, .. } => spec.to_string(),
            GraphSource::Inline { .. } => "inline".into(),
        }
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn auto() -> AlgoChoice {
    AlgoChoice::Auto
}

/// Everything needed to replay one run bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub graph: GraphSource,
    pub placement: Vec<Vertex>,
    #[serde(default = "auto")]
    pub algorithm: AlgoChoice,
    pub seed: u64,
    pub adversary: AdversaryMode,
    /// Defaults to `10 * (occ * delta + |V|)` of the initial configuration.
    #[serde(default)]
    pub max_epochs: Option<usize>,
    /// Re-evaluate every decision under a second relabeling.
    #[serde(default)]
    pub double_eval: bool,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: RunManifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if m.schema != MANIFEST_SCHEMA {
            bail!("{}: unsupported schema {:?} (expected {MANIFEST_SCHEMA})", path.display(), m.schema);
        }
        Ok(m)
    }
}

/// File written by `simulate`: the manifest, the graph it resolved to, the
/// trace and the checks run on it.
#[derive(Serialize)]
pub struct RunDocument<'a> {
    pub schema: &'static str,
    pub manifest: &'a RunManifest,
    pub graph: String,
    pub checks: &'a RunChecks,
    pub trace: &'a ExecutionTrace,
}

/// The parts of a saved run that `check-trace` reads back.
#[derive(Deserialize)]
pub struct SavedRun {
    pub graph: Option<String>,
    pub trace: ExecutionTrace,
}
