use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{BylineSlot, Corpus, CorpusBuilder, Field, Publication, RankCode, Researcher, Window};
use crate::error::{Error, Location, Result};
use crate::table::read_table;

pub const RESEARCHERS_FILE: &str = "researchers.csv";
pub const FIELDS_FILE: &str = "fields.csv";
pub const PUBLICATIONS_FILE: &str = "publications.csv";
pub const BYLINES_FILE: &str = "bylines.csv";
pub const WAGES_FILE: &str = "wages.csv";

pub(crate) const RESEARCHERS_HEADER: [&str; 6] = [
    "researcher_id",
    "gender",
    "rank",
    "field_code",
    "years_active",
    "affiliation_id",
];
pub(crate) const FIELDS_HEADER: [&str; 3] = ["field_code", "discipline_area", "byline_convention"];
pub(crate) const PUBLICATIONS_HEADER: [&str; 4] =
    ["publication_id", "year", "citations", "subject_categories"];
pub(crate) const BYLINES_HEADER: [&str; 4] = [
    "publication_id",
    "slot_index",
    "researcher_id",
    "affiliation_id",
];
pub(crate) const WAGES_HEADER: [&str; 2] = ["rank", "avg_yearly_wage"];

/// Row counts observed while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub researchers: usize,
    pub fields: usize,
    pub publications: usize,
    pub byline_slots: usize,
    pub wages: usize,
    pub excluded_out_of_window: usize,
}

/// Loads and cross-validates the five corpus tables from `dir`.
pub fn load_corpus(dir: &Path, window: Window) -> Result<(Corpus, LoadReport)> {
    let path = |name: &str| -> PathBuf { dir.join(name) };
    let mut builder = CorpusBuilder::new(window);

    let fields = read_table(&path(FIELDS_FILE), FIELDS_FILE, &FIELDS_HEADER)?;
    let n_fields = fields.len();
    for row in fields {
        let field = Field {
            code: row.required("field_code")?.to_string(),
            discipline_area: row.required("discipline_area")?.to_string(),
            byline_convention: row.parse("byline_convention")?,
        };
        builder.add_field(field, Some(row.location()))?;
    }

    let wages = read_table(&path(WAGES_FILE), WAGES_FILE, &WAGES_HEADER)?;
    let n_wages = wages.len();
    for row in wages {
        let wage: f64 = row.parse("avg_yearly_wage")?;
        if !(wage > 0.0 && wage.is_finite()) {
            return Err(Error::NonPositiveWage {
                rank: row.get("rank").to_string(),
                wage,
            });
        }
        builder.add_wage(
            RankCode(row.required("rank")?.to_string()),
            wage,
            Some(row.location()),
        )?;
    }

    let researchers = read_table(
        &path(RESEARCHERS_FILE),
        RESEARCHERS_FILE,
        &RESEARCHERS_HEADER,
    )?;
    let n_researchers = researchers.len();
    for row in researchers {
        let researcher = Researcher {
            id: row.required("researcher_id")?.to_string(),
            gender: row.parse("gender")?,
            rank: RankCode(row.required("rank")?.to_string()),
            field_code: row.required("field_code")?.to_string(),
            years_active: row.parse("years_active")?,
            affiliation_id: row.required("affiliation_id")?.to_string(),
        };
        builder.add_researcher(researcher, Some(row.location()))?;
    }

    // Bylines first, grouped per publication and ordered by slot.
    let bylines = read_table(&path(BYLINES_FILE), BYLINES_FILE, &BYLINES_HEADER)?;
    let n_slots = bylines.len();
    let mut slots: BTreeMap<String, BTreeMap<usize, (BylineSlot, Location)>> = BTreeMap::new();
    for row in bylines {
        let publication_id = row.required("publication_id")?.to_string();
        let slot_index: usize = row.parse("slot_index")?;
        let researcher_id = row.get("researcher_id").trim();
        let slot = BylineSlot {
            researcher_id: (!researcher_id.is_empty()).then(|| researcher_id.to_string()),
            affiliation_id: row.required("affiliation_id")?.to_string(),
        };
        let entry = slots.entry(publication_id.clone()).or_default();
        if entry.insert(slot_index, (slot, row.location())).is_some() {
            return Err(Error::DuplicateKey {
                location: row.location(),
                kind: "byline slot",
                id: format!("{publication_id}#{slot_index}"),
            });
        }
    }

    let publications = read_table(
        &path(PUBLICATIONS_FILE),
        PUBLICATIONS_FILE,
        &PUBLICATIONS_HEADER,
    )?;
    let n_publications = publications.len();
    for row in publications {
        let id = row.required("publication_id")?.to_string();
        let categories: Vec<String> = row
            .required("subject_categories")?
            .split(';')
            .map(|c| c.trim().to_string())
            .collect();
        let byline_rows = slots.remove(&id).unwrap_or_default();
        for (expected, (&found, (_, location))) in byline_rows.iter().enumerate() {
            if found != expected {
                return Err(Error::malformed(
                    location.clone(),
                    "slot_index",
                    format!("publication `{id}` is missing slot {expected}"),
                ));
            }
        }
        let (byline, slot_locations): (Vec<_>, Vec<_>) = byline_rows.into_values().unzip();
        let publication = Publication {
            id,
            year: row.parse("year")?,
            citations: row.parse("citations")?,
            subject_categories: categories,
            byline,
        };
        builder.add_publication_at(publication, row.location(), slot_locations)?;
    }
    if let Some((orphan, rows)) = slots.into_iter().next() {
        let location = rows
            .into_values()
            .next()
            .map(|(_, l)| l)
            .unwrap_or_else(|| Location::new(BYLINES_FILE, 0));
        return Err(Error::DanglingReference {
            location,
            kind: "publication_id",
            id: orphan,
        });
    }

    let excluded = builder.excluded_out_of_window();
    let corpus = builder.build()?;
    let report = LoadReport {
        researchers: n_researchers,
        fields: n_fields,
        publications: n_publications - excluded,
        byline_slots: n_slots,
        wages: n_wages,
        excluded_out_of_window: excluded,
    };
    debug_assert_eq!(report.publications, corpus.publications().len());
    Ok((corpus, report))
}
