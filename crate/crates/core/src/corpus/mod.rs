//! Researcher, field, publication and wage tables, plus ingestion and the
//! field-eligibility filters applied before any ranking.

mod builder;
mod eligibility;
mod incidence;
mod load;
mod write;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builder::CorpusBuilder;
pub use eligibility::{
    filter_eligible_fields, EligibilityCriteria, EligibilityReport, FieldEligibility, Membership,
};
pub use incidence::{gender_incidence_report, IncidenceGroup, IncidenceRow};
pub use load::{
    load_corpus, LoadReport, BYLINES_FILE, FIELDS_FILE, PUBLICATIONS_FILE, RESEARCHERS_FILE,
    WAGES_FILE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    F,
    M,
}

impl Gender {
    pub const BOTH: [Gender; 2] = [Gender::F, Gender::M];

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::F => "F",
            Gender::M => "M",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "f" => Ok(Gender::F),
            "M" | "m" => Ok(Gender::M),
            other => Err(format!("expected F or M, got `{other}`")),
        }
    }
}

/// Academic rank code. The usual codes are `assistant`, `associate` and `full`,
/// but any code declared in the wage table is accepted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RankCode(pub String);

impl RankCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RankCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RankCode {
    fn from(s: &str) -> Self {
        RankCode(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BylineConvention {
    Alphabetical,
    ContributionOrdered,
}

impl BylineConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            BylineConvention::Alphabetical => "alphabetical",
            BylineConvention::ContributionOrdered => "contribution_ordered",
        }
    }
}

impl FromStr for BylineConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alphabetical" => Ok(BylineConvention::Alphabetical),
            "contribution_ordered" => Ok(BylineConvention::ContributionOrdered),
            other => Err(format!(
                "expected alphabetical or contribution_ordered, got `{other}`"
            )),
        }
    }
}

/// Inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!(
                "window start {start} is after end {end}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> u32 {
        (self.end - self.start + 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

impl Default for Window {
    fn default() -> Self {
        Self {
            start: 2006,
            end: 2010,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("window `{s}` must look like START:END")))?;
        let parse = |part: &str| {
            part.trim()
                .parse::<i32>()
                .map_err(|_| Error::Config(format!("window `{s}`: `{part}` is not a year")))
        };
        Window::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Researcher {
    pub id: String,
    pub gender: Gender,
    pub rank: RankCode,
    pub field_code: String,
    pub years_active: u32,
    pub affiliation_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub code: String,
    pub discipline_area: String,
    pub byline_convention: BylineConvention,
}

/// One byline position. `researcher_id` is `None` for co-authors outside the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BylineSlot {
    pub researcher_id: Option<String>,
    pub affiliation_id: String,
}

impl BylineSlot {
    pub fn internal(researcher_id: &str, affiliation_id: &str) -> Self {
        Self {
            researcher_id: Some(researcher_id.to_string()),
            affiliation_id: affiliation_id.to_string(),
        }
    }

    pub fn external(affiliation_id: &str) -> Self {
        Self {
            researcher_id: None,
            affiliation_id: affiliation_id.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Publication {
    pub id: String,
    pub year: i32,
    pub subject_categories: Vec<String>,
    pub citations: u64,
    pub byline: Vec<BylineSlot>,
}

/// Average yearly wage per rank code.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WageTable {
    wages: BTreeMap<RankCode, f64>,
}

impl WageTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rank: RankCode, wage: f64) -> Result<()> {
        if !(wage > 0.0 && wage.is_finite()) {
            return Err(Error::NonPositiveWage { rank: rank.0, wage });
        }
        self.wages.insert(rank, wage);
        Ok(())
    }

    pub fn get(&self, rank: &RankCode) -> Option<f64> {
        self.wages.get(rank).copied()
    }

    pub fn contains(&self, rank: &RankCode) -> bool {
        self.wages.contains_key(rank)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RankCode, f64)> {
        self.wages.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.wages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wages.is_empty()
    }

    /// Every wage multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = WageTable::new();
        for (rank, wage) in self.iter() {
            out.insert(rank.clone(), wage * factor)?;
        }
        Ok(out)
    }
}

impl FromIterator<(RankCode, f64)> for WageTable {
    /// Panics on a non-positive wage; use [`WageTable::insert`] for fallible input.
    fn from_iter<I: IntoIterator<Item = (RankCode, f64)>>(iter: I) -> Self {
        let mut table = WageTable::new();
        for (rank, wage) in iter {
            table.insert(rank, wage).expect("wage must be positive");
        }
        table
    }
}

/// Validated, immutable set of input tables.
///
/// Construct through [`load_corpus`] or [`CorpusBuilder`]; both enforce
/// referential integrity, key uniqueness and the window bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    researchers: Vec<Researcher>,
    fields: Vec<Field>,
    publications: Vec<Publication>,
    wages: WageTable,
    window: Window,
    researcher_index: HashMap<String, usize>,
    field_index: HashMap<String, usize>,
    // researcher_id -> (publication index, slot index)
    authorship: HashMap<String, Vec<(usize, usize)>>,
}

impl Corpus {
    pub fn researchers(&self) -> &[Researcher] {
        &self.researchers
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn wages(&self) -> &WageTable {
        &self.wages
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn researcher(&self, id: &str) -> Option<&Researcher> {
        self.researcher_index.get(id).map(|&i| &self.researchers[i])
    }

    pub fn field(&self, code: &str) -> Option<&Field> {
        self.field_index.get(code).map(|&i| &self.fields[i])
    }

    /// Publications authored by `researcher_id`, with the slot they occupy.
    pub fn authored(
        &self,
        researcher_id: &str,
    ) -> impl Iterator<Item = (&Publication, usize)> + '_ {
        self.authorship
            .get(researcher_id)
            .into_iter()
            .flatten()
            .map(move |&(p, slot)| (&self.publications[p], slot))
    }

    pub fn publication_count(&self, researcher_id: &str) -> usize {
        self.authorship.get(researcher_id).map_or(0, Vec::len)
    }

    /// Copy of this corpus with a different wage table. Every researcher rank
    /// must still be priced.
    pub fn with_wages(&self, wages: WageTable) -> Result<Self> {
        for r in &self.researchers {
            if !wages.contains(&r.rank) {
                return Err(Error::DanglingReference {
                    location: crate::error::Location::new("wages", 0),
                    kind: "rank",
                    id: r.rank.0.clone(),
                });
            }
        }
        Ok(Self {
            wages,
            ..self.clone()
        })
    }

    /// Rebuilds the corpus with each publication passed through `edit`.
    /// The result is re-validated.
    pub fn map_publications(&self, mut edit: impl FnMut(&mut Publication)) -> Result<Self> {
        let mut builder = CorpusBuilder::new(self.window);
        for f in &self.fields {
            builder.add_field(f.clone(), None)?;
        }
        for (rank, wage) in self.wages.iter() {
            builder.add_wage(rank.clone(), wage, None)?;
        }
        for r in &self.researchers {
            builder.add_researcher(r.clone(), None)?;
        }
        for p in &self.publications {
            let mut p = p.clone();
            edit(&mut p);
            builder.add_publication(p, None)?;
        }
        builder.build()
    }
}
