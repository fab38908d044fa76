use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Corpus, Gender};

/// Which researchers count as members of a field for the productivity-share filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Membership {
    /// Everyone listed in the researcher table.
    #[default]
    AllListed,
    /// Only researchers active for the whole observation window.
    FullWindow,
}

impl std::str::FromStr for Membership {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Membership::AllListed),
            "full_window" => Ok(Membership::FullWindow),
            other => Err(format!("expected all or full_window, got `{other}`")),
        }
    }
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::AllListed => "all",
            Membership::FullWindow => "full_window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EligibilityCriteria {
    /// Minimum fraction of members with at least one publication in the window.
    pub min_productive_share: f64,
    /// Minimum headcount of each gender.
    pub min_per_gender: usize,
    pub membership: Membership,
}

impl Default for EligibilityCriteria {
    fn default() -> Self {
        Self {
            min_productive_share: 0.5,
            min_per_gender: 30,
            membership: Membership::AllListed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldEligibility {
    pub field_code: String,
    pub discipline_area: String,
    pub members: usize,
    pub productive: usize,
    pub female: usize,
    pub male: usize,
    pub productive_share: f64,
    pub eligible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EligibilityReport {
    /// One row per declared field, ordered by field code.
    pub fields: Vec<FieldEligibility>,
}

impl EligibilityReport {
    pub fn eligible(&self) -> BTreeSet<String> {
        self.fields
            .iter()
            .filter(|f| f.eligible)
            .map(|f| f.field_code.clone())
            .collect()
    }
}

/// Applies the productive-share and per-gender headcount filters to every field.
pub fn filter_eligible_fields(
    corpus: &Corpus,
    criteria: &EligibilityCriteria,
) -> EligibilityReport {
    #[derive(Default)]
    struct Tally {
        members: usize,
        productive: usize,
        female: usize,
        male: usize,
    }

    let full = corpus.window().len();
    let mut tallies: BTreeMap<&str, Tally> = corpus
        .fields()
        .iter()
        .map(|f| (f.code.as_str(), Tally::default()))
        .collect();
    for r in corpus.researchers() {
        if criteria.membership == Membership::FullWindow && r.years_active < full {
            continue;
        }
        let tally = tallies
            .get_mut(r.field_code.as_str())
            .expect("validated field reference");
        tally.members += 1;
        if corpus.publication_count(&r.id) > 0 {
            tally.productive += 1;
        }
        match r.gender {
            Gender::F => tally.female += 1,
            Gender::M => tally.male += 1,
        }
    }

    let fields = tallies
        .into_iter()
        .map(|(code, t)| {
            let share = if t.members == 0 {
                0.0
            } else {
                t.productive as f64 / t.members as f64
            };
            let eligible = t.members > 0
                && share >= criteria.min_productive_share
                && t.female >= criteria.min_per_gender
                && t.male >= criteria.min_per_gender;
            FieldEligibility {
                field_code: code.to_string(),
                discipline_area: corpus
                    .field(code)
                    .expect("declared field")
                    .discipline_area
                    .clone(),
                members: t.members,
                productive: t.productive,
                female: t.female,
                male: t.male,
                productive_share: share,
                eligible,
            }
        })
        .collect();
    EligibilityReport { fields }
}
