use std::collections::BTreeMap;

use serde::Serialize;

use super::{Corpus, Gender};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IncidenceGroup {
    Field,
    Area,
    Rank,
}

impl IncidenceGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            IncidenceGroup::Field => "field",
            IncidenceGroup::Area => "area",
            IncidenceGroup::Rank => "rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceRow {
    pub group: String,
    pub headcount: usize,
    pub female: usize,
    pub male: usize,
    pub female_share: f64,
}

/// Headcount and female share per group, ordered by group key.
pub fn gender_incidence_report(corpus: &Corpus, group_by: IncidenceGroup) -> Vec<IncidenceRow> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for r in corpus.researchers() {
        let key = match group_by {
            IncidenceGroup::Field => r.field_code.clone(),
            IncidenceGroup::Area => corpus
                .field(&r.field_code)
                .expect("validated")
                .discipline_area
                .clone(),
            IncidenceGroup::Rank => r.rank.0.clone(),
        };
        let entry = counts.entry(key).or_default();
        match r.gender {
            Gender::F => entry.0 += 1,
            Gender::M => entry.1 += 1,
        }
    }
    counts
        .into_iter()
        .map(|(group, (female, male))| {
            let headcount = female + male;
            IncidenceRow {
                group,
                headcount,
                female,
                male,
                female_share: female as f64 / headcount as f64,
            }
        })
        .collect()
}
