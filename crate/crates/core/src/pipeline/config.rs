use std::path::{Path, PathBuf};

use serde::Serialize;

use super::format::Precision;
use crate::corpus::{EligibilityCriteria, Window};
use crate::credit::CreditWeights;
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::ranking::StratifiedRanking;

/// Test used to compare FSS between genders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MedianTest {
    /// Student's t on means.
    #[default]
    TTest,
    MannWhitney,
}

impl MedianTest {
    pub fn as_str(self) -> &'static str {
        match self {
            MedianTest::TTest => "t_test",
            MedianTest::MannWhitney => "mann_whitney",
        }
    }
}

impl std::str::FromStr for MedianTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t_test" | "t" => Ok(MedianTest::TTest),
            "mann_whitney" | "mw" => Ok(MedianTest::MannWhitney),
            other => Err(Error::Config(format!(
                "median_test must be t_test or mann_whitney, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub corpus_dir: PathBuf,
    pub out_dir: PathBuf,
    pub window: Window,
    pub eligibility: EligibilityCriteria,
    pub weights: CreditWeights<f64>,
    pub weights_file: Option<PathBuf>,
    pub baselines_override: Option<PathBuf>,
    pub kde_grid: usize,
    pub kde_bandwidth: Option<f64>,
    pub median_test: MedianTest,
    pub ranking: StratifiedRanking,
    pub precision: Precision,
    /// Degenerate statistics abort the run instead of being reported as warnings.
    pub strict: bool,
    pub seed: u64,
    /// Unix seconds recorded in the manifest; the current time when unset.
    #[serde(skip)]
    pub timestamp: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::from("."),
            out_dir: PathBuf::from("out"),
            window: Window::default(),
            eligibility: EligibilityCriteria::default(),
            weights: CreditWeights::default(),
            weights_file: None,
            baselines_override: None,
            kde_grid: 512,
            kde_bandwidth: None,
            median_test: MedianTest::default(),
            ranking: StratifiedRanking::default(),
            precision: Precision::default(),
            strict: false,
            seed: 0,
            timestamp: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!(
            "`{key}`: expected true or false, got `{other}`"
        ))),
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 15] = [
        "corpus_dir",
        "out_dir",
        "window",
        "seed",
        "min_productive_share",
        "min_per_gender",
        "membership",
        "weights_file",
        "baselines_override",
        "kde_grid",
        "kde_bandwidth",
        "median_test",
        "ranking",
        "precision",
        "strict",
    ];

    /// Applies `key=value` settings on top of the current values. Relative
    /// paths are resolved against `base`.
    pub fn apply(&mut self, kv: &KeyValues, base: &Path) -> Result<()> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (key, value) in kv.iter() {
            match key {
                "corpus_dir" => self.corpus_dir = path(value),
                "out_dir" => self.out_dir = path(value),
                "window" => self.window = value.parse()?,
                "seed" => self.seed = parse(key, value)?,
                "min_productive_share" | "min_share" => {
                    self.eligibility.min_productive_share = parse(key, value)?
                }
                "min_per_gender" => self.eligibility.min_per_gender = parse(key, value)?,
                "membership" => {
                    self.eligibility.membership = value
                        .parse()
                        .map_err(|e: String| Error::Config(format!("`{key}`: {e}")))?
                }
                "weights_file" => self.weights_file = Some(path(value)),
                "baselines_override" | "override" => self.baselines_override = Some(path(value)),
                "kde_grid" => self.kde_grid = parse(key, value)?,
                "kde_bandwidth" => self.kde_bandwidth = Some(parse(key, value)?),
                "median_test" => self.median_test = value.parse()?,
                "ranking" => {
                    self.ranking = value
                        .parse()
                        .map_err(|e: String| Error::Config(format!("`{key}`: {e}")))?
                }
                "precision" => self.precision = value.parse()?,
                "strict" => self.strict = parse_bool(key, value)?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown setting `{other}` (expected one of {})",
                        Self::KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(())
    }

    /// Reads a `key=value` file and applies it; relative paths resolve against the file's directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let kv = KeyValues::from_file(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.apply(&kv, &base)
    }

    /// Loads the weights file, if any, into `weights`, then checks every setting.
    pub fn resolve(mut self) -> Result<Self> {
        if let Some(file) = &self.weights_file {
            self.weights = CreditWeights::from_file(file)?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let share = self.eligibility.min_productive_share;
        if !(0.0..=1.0).contains(&share) {
            return Err(Error::Config(format!(
                "min_productive_share must be in [0, 1], got {share}"
            )));
        }
        if self.kde_grid < 2 {
            return Err(Error::Config(format!(
                "kde_grid must be at least 2, got {}",
                self.kde_grid
            )));
        }
        if let Some(h) = self.kde_bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!(
                    "kde_bandwidth must be positive, got {h}"
                )));
            }
        }
        self.weights.validate()
    }
}
