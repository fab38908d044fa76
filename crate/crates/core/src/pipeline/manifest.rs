use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{RunConfig, RunOutcome};
use crate::corpus::{BYLINES_FILE, FIELDS_FILE, PUBLICATIONS_FILE, RESEARCHERS_FILE, WAGES_FILE};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub sha256: String,
    pub bytes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

impl FileDigest {
    fn of(bytes: &[u8], rows: Option<usize>) -> Self {
        Self {
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
            rows,
        }
    }
}

/// What was run, on which inputs, and what came out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Unix seconds.
    pub timestamp: i64,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
    pub counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

fn digest_file(path: &Path) -> Result<FileDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(FileDigest::of(&bytes, None))
}

impl RunManifest {
    pub fn build(config: &RunConfig, outcome: &RunOutcome) -> Result<Self> {
        let mut inputs = BTreeMap::new();
        for name in [
            FIELDS_FILE,
            WAGES_FILE,
            RESEARCHERS_FILE,
            PUBLICATIONS_FILE,
            BYLINES_FILE,
        ] {
            inputs.insert(
                name.to_string(),
                digest_file(&config.corpus_dir.join(name))?,
            );
        }
        for (key, path) in [
            ("weights_file", &config.weights_file),
            ("baselines_override", &config.baselines_override),
        ] {
            if let Some(path) = path {
                inputs.insert(key.to_string(), digest_file(path)?);
            }
        }
        let outputs = outcome
            .outputs
            .iter()
            .map(|(name, f)| (name.to_string(), FileDigest::of(&f.bytes, f.rows)))
            .collect();
        let timestamp = config.timestamp.unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
        Ok(Self {
            tool: "fss-rank",
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
            config: config.clone(),
            inputs,
            outputs,
            counts: outcome.counts.clone(),
            warnings: outcome.warnings.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
