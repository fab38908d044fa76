use std::collections::{HashMap, HashSet};

use super::{Corpus, Field, Publication, RankCode, Researcher, WageTable, Window};
use crate::error::{Error, Location, Result};

/// Incremental, validating constructor for [`Corpus`].
///
/// Key uniqueness is checked as rows arrive; cross-table references are
/// checked in [`CorpusBuilder::build`] so tables may be added in any order.
/// Publications dated outside the window are dropped and counted.
#[derive(Debug)]
pub struct CorpusBuilder {
    window: Window,
    fields: Vec<(Field, Location)>,
    field_keys: HashSet<String>,
    wages: WageTable,
    researchers: Vec<(Researcher, Location)>,
    researcher_keys: HashSet<String>,
    publications: Vec<(Publication, Location, Vec<Location>)>,
    publication_keys: HashSet<String>,
    excluded_out_of_window: usize,
}

impl CorpusBuilder {
    pub fn new(window: Window) -> Self {
        Self {
            window,
            fields: Vec::new(),
            field_keys: HashSet::new(),
            wages: WageTable::new(),
            researchers: Vec::new(),
            researcher_keys: HashSet::new(),
            publications: Vec::new(),
            publication_keys: HashSet::new(),
            excluded_out_of_window: 0,
        }
    }

    pub fn excluded_out_of_window(&self) -> usize {
        self.excluded_out_of_window
    }

    pub fn add_field(&mut self, field: Field, location: Option<Location>) -> Result<()> {
        let location =
            location.unwrap_or_else(|| Location::new("<fields>", self.fields.len() as u64 + 1));
        if !self.field_keys.insert(field.code.clone()) {
            return Err(Error::DuplicateKey {
                location,
                kind: "field_code",
                id: field.code,
            });
        }
        self.fields.push((field, location));
        Ok(())
    }

    pub fn add_wage(
        &mut self,
        rank: RankCode,
        wage: f64,
        location: Option<Location>,
    ) -> Result<()> {
        if self.wages.contains(&rank) {
            let location =
                location.unwrap_or_else(|| Location::new("<wages>", self.wages.len() as u64 + 1));
            return Err(Error::DuplicateKey {
                location,
                kind: "rank",
                id: rank.0,
            });
        }
        self.wages.insert(rank, wage)
    }

    pub fn add_researcher(
        &mut self,
        researcher: Researcher,
        location: Option<Location>,
    ) -> Result<()> {
        let location = location
            .unwrap_or_else(|| Location::new("<researchers>", self.researchers.len() as u64 + 1));
        if !self.researcher_keys.insert(researcher.id.clone()) {
            return Err(Error::DuplicateKey {
                location,
                kind: "researcher_id",
                id: researcher.id,
            });
        }
        if researcher.years_active < 1 || researcher.years_active > self.window.len() {
            return Err(Error::malformed(
                location,
                "years_active",
                format!(
                    "{} is outside 1..={}",
                    researcher.years_active,
                    self.window.len()
                ),
            ));
        }
        self.researchers.push((researcher, location));
        Ok(())
    }

    pub fn add_publication(
        &mut self,
        publication: Publication,
        location: Option<Location>,
    ) -> Result<()> {
        let location = location
            .unwrap_or_else(|| Location::new("<publications>", self.publications.len() as u64 + 1));
        let slots = vec![location.clone(); publication.byline.len()];
        self.add_publication_at(publication, location, slots)
    }

    /// Like [`add_publication`](Self::add_publication) with a separate location per byline slot.
    pub(crate) fn add_publication_at(
        &mut self,
        publication: Publication,
        location: Location,
        slot_locations: Vec<Location>,
    ) -> Result<()> {
        if !self.publication_keys.insert(publication.id.clone()) {
            return Err(Error::DuplicateKey {
                location,
                kind: "publication_id",
                id: publication.id,
            });
        }
        if publication.subject_categories.is_empty()
            || publication.subject_categories.iter().any(String::is_empty)
        {
            return Err(Error::malformed(
                location,
                "subject_categories",
                "at least one nonempty category required",
            ));
        }
        if publication.byline.is_empty() {
            return Err(Error::malformed(
                location,
                "publication_id",
                format!("publication `{}` has no byline", publication.id),
            ));
        }
        if !self.window.contains(publication.year) {
            self.excluded_out_of_window += 1;
            return Ok(());
        }
        self.publications
            .push((publication, location, slot_locations));
        Ok(())
    }

    pub fn build(self) -> Result<Corpus> {
        let CorpusBuilder {
            window,
            fields,
            wages,
            researchers,
            publications,
            ..
        } = self;

        let field_index: HashMap<String, usize> = fields
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (f.code.clone(), i))
            .collect();

        for (r, location) in &researchers {
            if !field_index.contains_key(&r.field_code) {
                return Err(Error::DanglingReference {
                    location: location.clone(),
                    kind: "field_code",
                    id: r.field_code.clone(),
                });
            }
            if !wages.contains(&r.rank) {
                return Err(Error::DanglingReference {
                    location: location.clone(),
                    kind: "rank",
                    id: r.rank.0.clone(),
                });
            }
        }
        let researcher_index: HashMap<String, usize> = researchers
            .iter()
            .enumerate()
            .map(|(i, (r, _))| (r.id.clone(), i))
            .collect();

        let mut authorship: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
        for (p_idx, (p, _, slot_locations)) in publications.iter().enumerate() {
            for (slot, entry) in p.byline.iter().enumerate() {
                let Some(id) = &entry.researcher_id else {
                    continue;
                };
                if !researcher_index.contains_key(id) {
                    return Err(Error::DanglingReference {
                        location: slot_locations[slot].clone(),
                        kind: "researcher_id",
                        id: id.clone(),
                    });
                }
                authorship
                    .entry(id.clone())
                    .or_default()
                    .push((p_idx, slot));
            }
        }

        Ok(Corpus {
            researchers: researchers.into_iter().map(|(r, _)| r).collect(),
            fields: fields.into_iter().map(|(f, _)| f).collect(),
            publications: publications.into_iter().map(|(p, _, _)| p).collect(),
            wages,
            window,
            researcher_index,
            field_index,
            authorship,
        })
    }
}
