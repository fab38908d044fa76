use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::stages::TOTAL;
use super::Outputs;
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.txt";

/// Somewhere pipeline outputs can be read back from.
pub trait OutputSource {
    fn read(&self, name: &str) -> Result<Vec<u8>>;
}

impl OutputSource for Outputs {
    fn read(&self, name: &str) -> Result<Vec<u8>> {
        self.get(name)
            .map(|f| f.bytes.clone())
            .ok_or_else(|| Error::InvalidInput(format!("missing upstream output `{name}`")))
    }
}

impl OutputSource for Path {
    fn read(&self, name: &str) -> Result<Vec<u8>> {
        let path = self.join(name);
        std::fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                Error::InvalidInput(format!("missing upstream output `{}`", path.display()))
            }
            _ => Error::io(path, e),
        })
    }
}

/// In-memory outputs first, then files on disk.
pub(crate) struct Layered<'a> {
    pub(crate) memory: &'a Outputs,
    pub(crate) dir: &'a Path,
}

impl OutputSource for Layered<'_> {
    fn read(&self, name: &str) -> Result<Vec<u8>> {
        match self.memory.get(name) {
            Some(f) => Ok(f.bytes.clone()),
            None => self.dir.read(name),
        }
    }
}

type Record = BTreeMap<String, String>;

fn records(source: &(impl OutputSource + ?Sized), name: &str) -> Result<Vec<Record>> {
    let bytes = source.read(name)?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let csv_err = |e| Error::Csv {
        path: name.into(),
        source: e,
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    reader
        .records()
        .map(|r| {
            let r = r.map_err(csv_err)?;
            Ok(header
                .iter()
                .zip(r.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect())
        })
        .collect()
}

fn field<'a>(r: &'a Record, key: &str) -> &'a str {
    r.get(key).map_or("", String::as_str)
}

fn find<'a>(rows: &'a [Record], pairs: &[(&str, &str)]) -> Option<&'a Record> {
    rows.iter()
        .find(|r| pairs.iter().all(|(k, v)| field(r, k) == *v))
}

fn or_na(s: &str) -> &str {
    if s.is_empty() {
        "n/a"
    } else {
        s
    }
}

/// Plain-text digest per discipline area: female incidence, unproductive
/// shares and mean FSS by gender with significance stars (`**` p < 0.05,
/// `***` p < 0.01), mean rank shifts and field counts per shift class.
pub fn render_summary(source: &(impl OutputSource + ?Sized)) -> Result<String> {
    let eligibility = records(source, "eligibility.csv")?;
    let incidence = records(source, "incidence_by_area.csv")?;
    let stats = records(source, "stats_by_area.csv")?;
    let tests = records(source, "tests_by_area.csv")?;
    let shifts = records(source, "shift_summary_by_area.csv")?;
    let classes = records(source, "class_counts_by_area.csv")?;

    let mut areas: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in eligibility
        .iter()
        .filter(|r| field(r, "eligible") == "true")
    {
        areas
            .entry(field(r, "discipline_area").to_string())
            .or_default()
            .push(field(r, "field_code").to_string());
    }

    let mut s = String::new();
    writeln!(s, "FSS rank-shift summary").unwrap();
    writeln!(
        s,
        "eligible fields: {} of {}",
        areas.values().map(Vec::len).sum::<usize>(),
        eligibility.len()
    )
    .unwrap();
    if areas.is_empty() {
        writeln!(s, "no eligible fields").unwrap();
        return Ok(s);
    }

    let all_fields: Vec<String> = areas.values().flatten().cloned().collect();
    let mut blocks: Vec<(String, Vec<String>)> = areas.into_iter().collect();
    blocks.push((TOTAL.to_string(), all_fields));

    for (area, fields) in &blocks {
        writeln!(s).unwrap();
        writeln!(s, "[{area}] fields: {}", fields.join(", ")).unwrap();

        let (female, headcount) = if area == TOTAL {
            incidence.iter().fold((0usize, 0usize), |(f, n), r| {
                (
                    f + field(r, "female").parse::<usize>().unwrap_or(0),
                    n + field(r, "headcount").parse::<usize>().unwrap_or(0),
                )
            })
        } else {
            find(&incidence, &[("group", area)]).map_or((0, 0), |r| {
                (
                    field(r, "female").parse().unwrap_or(0),
                    field(r, "headcount").parse().unwrap_or(0),
                )
            })
        };
        if headcount > 0 {
            let pct = 100.0 * female as f64 / headcount as f64;
            writeln!(
                s,
                "  female incidence: {pct:.1}% of {headcount} researchers"
            )
            .unwrap();
        }

        if let Some(t) = find(&tests, &[("group", area)]) {
            writeln!(
                s,
                "  unproductive %: M {} | F {} (z = {}, p = {}{})",
                or_na(field(t, "pct_unproductive_m")),
                or_na(field(t, "pct_unproductive_f")),
                or_na(field(t, "z")),
                or_na(field(t, "z_p_value")),
                star_suffix(field(t, "z_stars")),
            )
            .unwrap();
            let mean = |g: &str| {
                find(&stats, &[("discipline_area", area), ("gender", g)])
                    .map_or("n/a", |r| or_na(field(r, "mean")))
            };
            writeln!(
                s,
                "  mean field-normalized FSS: M {} | F {} ({} = {}, p = {}{})",
                mean("M"),
                mean("F"),
                field(t, "mean_test"),
                or_na(field(t, "statistic")),
                or_na(field(t, "p_value")),
                star_suffix(field(t, "stars")),
            )
            .unwrap();
        }

        let shift = |g: &str| {
            find(&shifts, &[("discipline_area", area), ("gender", g)])
                .map_or("n/a", |r| or_na(field(r, "mean")))
        };
        writeln!(s, "  mean rank shift: M {} | F {}", shift("M"), shift("F")).unwrap();
        for g in ["M", "F"] {
            if let Some(r) = find(&classes, &[("discipline_area", area), ("gender", g)]) {
                let counts: Vec<String> = ["Cl-1", "Cl-2", "Cl-3", "Cl-4", "Cl-5", "Cl-6"]
                    .iter()
                    .map(|k| format!("{k} {}", field(r, k)))
                    .collect();
                writeln!(s, "  fields by class, {g}: {}", counts.join(", ")).unwrap();
            }
        }
    }
    Ok(s)
}

fn star_suffix(stars: &str) -> String {
    if stars.is_empty() {
        String::new()
    } else {
        format!(" {stars}")
    }
}
