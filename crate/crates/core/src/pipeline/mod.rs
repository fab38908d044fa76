//! End-to-end runs: load, credit, baselines, FSS, ranking, statistics and the
//! text summary, with every output held in memory until the run succeeds.

mod config;
mod format;
mod manifest;
mod report;
mod stages;

use std::collections::BTreeMap;
use std::path::Path;

pub use config::{MedianTest, RunConfig};
pub use format::Precision;
pub use manifest::{FileDigest, RunManifest, MANIFEST_FILE};
pub use report::{render_summary, OutputSource, SUMMARY_FILE};

use crate::error::{Error, Result};
use format::Table;
use stages::{Analysis, Diagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Shares,
    Baselines,
    Compute,
    Rank,
    Stats,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Shares,
        Stage::Baselines,
        Stage::Compute,
        Stage::Rank,
        Stage::Stats,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Shares => "shares",
            Stage::Baselines => "baselines",
            Stage::Compute => "compute",
            Stage::Rank => "rank",
            Stage::Stats => "stats",
            Stage::Report => "report",
        }
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub bytes: Vec<u8>,
    /// Data rows for tables, `None` for free text.
    pub rows: Option<usize>,
}

/// Output files by name, kept in memory until written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outputs {
    files: BTreeMap<String, OutputFile>,
}

impl Outputs {
    pub fn get(&self, name: &str) -> Option<&OutputFile> {
        self.files.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &OutputFile)> {
        self.files.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub(crate) fn table(&mut self, name: impl Into<String>, table: &Table) {
        self.files.insert(
            name.into(),
            OutputFile {
                bytes: table.to_bytes(),
                rows: Some(table.len()),
            },
        );
    }

    pub(crate) fn text(&mut self, name: impl Into<String>, text: String) {
        self.files.insert(
            name.into(),
            OutputFile {
                bytes: text.into_bytes(),
                rows: None,
            },
        );
    }

    /// Writes every file into `dir`. On failure, files written by this call are removed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for (name, file) in &self.files {
            let path = dir.join(name);
            if let Err(e) = std::fs::write(&path, &file.bytes) {
                for done in &written {
                    let _ = std::fs::remove_file(done);
                }
                return Err(Error::io(path, e));
            }
            written.push(path);
        }
        Ok(())
    }
}

/// Result of running one or more stages in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub outputs: Outputs,
    pub warnings: Vec<String>,
    /// Per-stage counts, e.g. `ingest.researchers`.
    pub counts: BTreeMap<String, usize>,
}

/// Runs `stages` (in pipeline order, regardless of the order given) without
/// touching the output directory, except that a lone report stage reads its
/// inputs from there.
pub fn execute(config: &RunConfig, stages: &[Stage]) -> Result<RunOutcome> {
    config.validate()?;
    let mut wanted: Vec<Stage> = stages.to_vec();
    wanted.sort();
    wanted.dedup();

    let mut outputs = Outputs::default();
    let mut diag = Diagnostics::new(config.strict);
    let mut counts = BTreeMap::new();

    let computing: Vec<Stage> = wanted
        .iter()
        .copied()
        .filter(|s| *s != Stage::Report)
        .collect();
    if !computing.is_empty() {
        let analysis = Analysis::prepare(config, &computing)?;
        for stage in &computing {
            analysis
                .emit(*stage, &mut diag, &mut outputs, &mut counts)
                .map_err(|e| e.in_stage(stage.name()))?;
        }
    }
    if wanted.contains(&Stage::Report) {
        let source = report::Layered {
            memory: &outputs,
            dir: &config.out_dir,
        };
        let text = render_summary(&source).map_err(|e| e.in_stage(Stage::Report.name()))?;
        outputs.text(SUMMARY_FILE, text);
    }
    Ok(RunOutcome {
        outputs,
        warnings: diag.warnings,
        counts,
    })
}

/// Runs one stage and writes its files to the configured output directory.
pub fn run_stage(config: &RunConfig, stage: Stage) -> Result<RunOutcome> {
    let outcome = execute(config, &[stage])?;
    outcome.outputs.write_to(&config.out_dir)?;
    Ok(outcome)
}

/// Runs every stage, then writes all outputs and `manifest.json`. Nothing is
/// written if any stage fails.
pub fn run_pipeline(config: &RunConfig) -> Result<RunManifest> {
    let outcome = execute(config, &Stage::ALL)?;
    let manifest = RunManifest::build(config, &outcome)?;
    let mut outputs = outcome.outputs;
    outputs.text(MANIFEST_FILE, manifest.to_json());
    outputs.write_to(&config.out_dir)?;
    Ok(manifest)
}
