use std::fs::File;
use std::path::Path;

use super::load::{
    BYLINES_HEADER, FIELDS_HEADER, PUBLICATIONS_HEADER, RESEARCHERS_HEADER, WAGES_HEADER,
};
use super::{Corpus, BYLINES_FILE, FIELDS_FILE, PUBLICATIONS_FILE, RESEARCHERS_FILE, WAGES_FILE};
use crate::error::{Error, Result};

impl Corpus {
    /// Writes the five input tables to `dir` in the format [`super::load_corpus`] reads.
    /// Wages are written in shortest round-trip form, so reloading is exact.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        write_table(
            dir,
            FIELDS_FILE,
            &FIELDS_HEADER,
            self.fields().iter().map(|f| {
                vec![
                    f.code.clone(),
                    f.discipline_area.clone(),
                    f.byline_convention.as_str().to_string(),
                ]
            }),
        )?;

        write_table(
            dir,
            WAGES_FILE,
            &WAGES_HEADER,
            self.wages()
                .iter()
                .map(|(rank, wage)| vec![rank.0.clone(), wage.to_string()]),
        )?;

        write_table(
            dir,
            RESEARCHERS_FILE,
            &RESEARCHERS_HEADER,
            self.researchers().iter().map(|r| {
                vec![
                    r.id.clone(),
                    r.gender.to_string(),
                    r.rank.0.clone(),
                    r.field_code.clone(),
                    r.years_active.to_string(),
                    r.affiliation_id.clone(),
                ]
            }),
        )?;

        write_table(
            dir,
            PUBLICATIONS_FILE,
            &PUBLICATIONS_HEADER,
            self.publications().iter().map(|p| {
                vec![
                    p.id.clone(),
                    p.year.to_string(),
                    p.citations.to_string(),
                    p.subject_categories.join(";"),
                ]
            }),
        )?;

        write_table(
            dir,
            BYLINES_FILE,
            &BYLINES_HEADER,
            self.publications().iter().flat_map(|p| {
                p.byline.iter().enumerate().map(move |(slot, s)| {
                    vec![
                        p.id.clone(),
                        slot.to_string(),
                        s.researcher_id.clone().unwrap_or_default(),
                        s.affiliation_id.clone(),
                    ]
                })
            }),
        )
    }
}

fn write_table(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    let csv_err = |source| Error::Csv {
        path: path.clone(),
        source,
    };
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Error::io(&path, e))
}
