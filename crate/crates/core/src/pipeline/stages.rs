use std::collections::BTreeMap;

use super::config::{MedianTest, RunConfig};
use super::format::Table;
use super::{Outputs, Stage};
use crate::corpus::{
    filter_eligible_fields, gender_incidence_report, load_corpus, Corpus, EligibilityReport,
    Gender, IncidenceGroup, LoadReport,
};
use crate::credit::{compute_shares, ShareScheme, ShareSet};
use crate::error::{Error, Result};
use crate::fss::{compute_all_fss, FssScore};
use crate::impact::{compute_baselines, CitationBaseline};
use crate::ranking::{
    classify_field_shifts, distance_ratios, rank_field, rank_shifts, shift_summary, FieldClass,
    RankShift, ShiftClass, ShiftSummary,
};
use crate::stats::{
    descriptive_stats, epanechnikov_kde, mann_whitney_u, point_biserial, t_test_independent,
    z_test_proportions, Descriptive, PointBiserialResult, TestResult,
};

pub(crate) const TOTAL: &str = "TOTAL";

/// Collects degenerate-statistics messages, or turns them into errors in strict mode.
pub(crate) struct Diagnostics {
    strict: bool,
    pub(crate) warnings: Vec<String>,
}

impl Diagnostics {
    pub(crate) fn new(strict: bool) -> Self {
        Self {
            strict,
            warnings: Vec::new(),
        }
    }

    fn tolerate<T>(&mut self, result: Result<T>) -> Result<Option<T>> {
        match result {
            Ok(v) => Ok(Some(v)),
            Err(Error::Degenerate(msg)) if !self.strict => {
                self.warnings.push(msg);
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

/// Prefixes a degenerate-statistics message with the group it concerns.
fn labelled<T>(key: &str, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Degenerate(msg) => Error::Degenerate(format!("{key}: {msg}")),
        other => other,
    })
}

pub(crate) fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else {
        ""
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Inputs shared by the computing stages, built only as far as the requested stages need.
pub(crate) struct Analysis<'a> {
    config: &'a RunConfig,
    corpus: Corpus,
    load: LoadReport,
    eligibility: EligibilityReport,
    shares: Option<ShareSet<f64>>,
    baselines: Option<(CitationBaseline<f64>, usize)>,
    fss: Option<BTreeMap<String, Vec<FssScore<f64>>>>,
}

impl<'a> Analysis<'a> {
    pub(crate) fn prepare(config: &'a RunConfig, stages: &[Stage]) -> Result<Self> {
        let needs = |set: &[Stage]| stages.iter().any(|s| set.contains(s));
        let (corpus, load) =
            load_corpus(&config.corpus_dir, config.window).map_err(|e| e.in_stage("ingest"))?;
        let eligibility = filter_eligible_fields(&corpus, &config.eligibility);

        let downstream = [Stage::Compute, Stage::Rank, Stage::Stats];
        let shares = if needs(&[Stage::Shares]) || needs(&downstream) {
            Some(compute_shares(&corpus, &config.weights).map_err(|e| e.in_stage("shares"))?)
        } else {
            None
        };
        let baselines = if needs(&[Stage::Baselines]) || needs(&downstream) {
            let mut b = compute_baselines(&corpus);
            let overrides = match &config.baselines_override {
                Some(path) => b
                    .apply_override_file(path)
                    .map_err(|e| e.in_stage("baselines"))?,
                None => 0,
            };
            Some((b, overrides))
        } else {
            None
        };
        let fss = if needs(&downstream) {
            let shares = shares.as_ref().expect("computed above");
            let (baselines, _) = baselines.as_ref().expect("computed above");
            Some(
                compute_all_fss(&corpus, shares, baselines, corpus.wages())
                    .map_err(|e| e.in_stage("compute"))?,
            )
        } else {
            None
        };
        Ok(Self {
            config,
            corpus,
            load,
            eligibility,
            shares,
            baselines,
            fss,
        })
    }

    pub(crate) fn emit(
        &self,
        stage: Stage,
        diag: &mut Diagnostics,
        out: &mut Outputs,
        counts: &mut BTreeMap<String, usize>,
    ) -> Result<()> {
        let mut count = |key: &str, n: usize| {
            counts.insert(format!("{}.{key}", stage.name()), n);
        };
        match stage {
            Stage::Ingest => self.ingest(out, &mut count),
            Stage::Shares => self.shares(out, &mut count),
            Stage::Baselines => self.baselines(out, &mut count),
            Stage::Compute => self.compute(out, &mut count),
            Stage::Rank => self.rank(diag, out, &mut count)?,
            Stage::Stats => self.stats(diag, out, &mut count)?,
            Stage::Report => unreachable!("report is rendered from files"),
        }
        Ok(())
    }

    fn area(&self, field_code: &str) -> &str {
        &self
            .corpus
            .field(field_code)
            .expect("validated field")
            .discipline_area
    }

    fn fss(&self) -> &BTreeMap<String, Vec<FssScore<f64>>> {
        self.fss.as_ref().expect("prepared for this stage")
    }

    /// Eligible fields that have at least one researcher, in field-code order.
    fn eligible_scores(&self) -> impl Iterator<Item = (&str, &[FssScore<f64>])> {
        let fss = self.fss();
        self.eligibility
            .eligible()
            .into_iter()
            .filter_map(move |code| {
                fss.get_key_value(&code)
                    .map(|(k, v)| (k.as_str(), v.as_slice()))
            })
    }

    fn ingest(&self, out: &mut Outputs, count: &mut impl FnMut(&str, usize)) {
        let p = self.config.precision;
        let mut t = Table::new(
            &[
                "field_code",
                "discipline_area",
                "members",
                "productive",
                "female",
                "male",
                "productive_share",
                "eligible",
            ],
            p,
        );
        for f in &self.eligibility.fields {
            t.row()
                .text(&f.field_code)
                .text(&f.discipline_area)
                .text(f.members)
                .text(f.productive)
                .text(f.female)
                .text(f.male)
                .num(f.productive_share)
                .text(flag(f.eligible));
        }
        out.table("eligibility.csv", &t);

        for group in [
            IncidenceGroup::Field,
            IncidenceGroup::Area,
            IncidenceGroup::Rank,
        ] {
            let mut t = Table::new(&["group", "headcount", "female", "male", "female_share"], p);
            for r in gender_incidence_report(&self.corpus, group) {
                t.row()
                    .text(&r.group)
                    .text(r.headcount)
                    .text(r.female)
                    .text(r.male)
                    .num(r.female_share);
            }
            out.table(format!("incidence_by_{}.csv", group.as_str()), &t);
        }

        let l = &self.load;
        count("researchers", l.researchers);
        count("fields", l.fields);
        count("publications", l.publications);
        count("byline_slots", l.byline_slots);
        count("wages", l.wages);
        count("excluded_out_of_window", l.excluded_out_of_window);
        count("eligible_fields", self.eligibility.eligible().len());
    }

    fn shares(&self, out: &mut Outputs, count: &mut impl FnMut(&str, usize)) {
        let p = self.config.precision;
        let shares = self.shares.as_ref().expect("prepared for this stage");
        let mut t = Table::new(&["publication_id", "slot_index", "share"], p);
        let mut schemes = Table::new(&["publication_id", "authors", "scheme"], p);
        let mut fallback = 0;
        for (id, v) in shares {
            for (slot, share) in v.shares.iter().enumerate() {
                t.row().text(id).text(slot).num(*share);
            }
            schemes.row().text(id).text(v.len()).text(v.scheme.as_str());
            fallback += usize::from(v.scheme == ShareScheme::UniformFallback);
        }
        out.table("shares.csv", &t);
        out.table("share_schemes.csv", &schemes);
        count("publications", shares.len());
        count("slots", t.len());
        count("uniform_fallback", fallback);
    }

    fn baselines(&self, out: &mut Outputs, count: &mut impl FnMut(&str, usize)) {
        let (baselines, overrides) = self.baselines.as_ref().expect("prepared for this stage");
        let mut t = Table::new(&crate::impact::BASELINES_HEADER, self.config.precision);
        for (year, category, cell) in baselines.iter() {
            t.row()
                .text(year)
                .text(category)
                .num(cell.mean)
                .text(cell.cited.map(|n| n.to_string()).unwrap_or_default());
        }
        out.table("baselines.csv", &t);
        count("cells", baselines.len());
        count("overrides", *overrides);
    }

    fn compute(&self, out: &mut Outputs, count: &mut impl FnMut(&str, usize)) {
        let mut t = Table::new(
            &["researcher_id", "field_code", "gender", "fss", "productive"],
            self.config.precision,
        );
        let mut productive = 0;
        for s in self.fss().values().flatten() {
            t.row()
                .text(&s.researcher_id)
                .text(&s.field_code)
                .text(s.gender)
                .num(s.value)
                .text(flag(s.productive));
            productive += usize::from(s.productive);
        }
        out.table("fss.csv", &t);
        count("researchers", t.len());
        count("productive", productive);
    }

    fn rank(
        &self,
        diag: &mut Diagnostics,
        out: &mut Outputs,
        count: &mut impl FnMut(&str, usize),
    ) -> Result<()> {
        let p = self.config.precision;
        let mut entries_t = Table::new(
            &[
                "researcher_id",
                "field_code",
                "gender",
                "fss",
                "ratio_pooled",
                "ratio_gender",
                "percentile_pooled",
                "percentile_gender",
            ],
            p,
        );
        let mut shifts_t = Table::new(&["researcher_id", "field_code", "gender", "shift"], p);
        let mut scatter_t = Table::new(
            &[
                "researcher_id",
                "field_code",
                "discipline_area",
                "gender",
                "ratio_pooled",
                "ratio_gender",
            ],
            p,
        );
        let mut all_shifts: Vec<RankShift<f64>> = Vec::new();
        let mut classes: Vec<FieldClass<f64>> = Vec::new();
        let mut ranked_fields = 0;

        for (code, scores) in self.eligible_scores() {
            let Some(ratios) = diag.tolerate(distance_ratios(scores))? else {
                continue;
            };
            let Some(entries) = diag.tolerate(rank_field(&ratios, self.config.ranking))? else {
                continue;
            };
            ranked_fields += 1;
            let area = self.area(code);
            for e in &entries {
                entries_t
                    .row()
                    .text(&e.researcher_id)
                    .text(&e.field_code)
                    .text(e.gender)
                    .num(e.fss)
                    .num(e.ratio_pooled)
                    .num(e.ratio_gender)
                    .num(e.percentile_pooled)
                    .num(e.percentile_gender);
                scatter_t
                    .row()
                    .text(&e.researcher_id)
                    .text(&e.field_code)
                    .text(area)
                    .text(e.gender)
                    .num(e.ratio_pooled)
                    .num(e.ratio_gender);
            }
            let shifts = rank_shifts(&entries);
            for s in &shifts {
                shifts_t
                    .row()
                    .text(&s.researcher_id)
                    .text(&s.field_code)
                    .text(s.gender)
                    .num(s.shift);
            }
            for g in Gender::BOTH {
                classes.push(classify_field_shifts(&shifts, g)?);
            }
            all_shifts.extend(shifts);
        }

        let mut classes_t = Table::new(
            &[
                "field_code",
                "discipline_area",
                "gender",
                "members",
                "mean_shift",
                "class",
            ],
            p,
        );
        for c in &classes {
            classes_t
                .row()
                .text(&c.field_code)
                .text(self.area(&c.field_code))
                .text(c.gender)
                .text(c.members)
                .num(c.mean_shift)
                .text(c.class);
        }

        // Number of fields per class, by area and gender, with overall totals.
        let mut class_counts: BTreeMap<(String, Gender), [usize; 6]> = BTreeMap::new();
        for c in &classes {
            let idx = ShiftClass::ALL
                .iter()
                .position(|k| *k == c.class)
                .expect("known class");
            for key in [self.area(&c.field_code).to_string(), TOTAL.to_string()] {
                class_counts.entry((key, c.gender)).or_default()[idx] += 1;
            }
        }
        let mut counts_t = Table::new(
            &[
                "discipline_area",
                "gender",
                "Cl-1",
                "Cl-2",
                "Cl-3",
                "Cl-4",
                "Cl-5",
                "Cl-6",
                "fields",
            ],
            p,
        );
        for ((area, gender), n) in total_last(class_counts) {
            let mut row = counts_t.row().text(area).text(gender);
            for k in n {
                row = row.text(k);
            }
            row.text(n.iter().sum::<usize>());
        }

        let by_field = shift_summary(&all_shifts, |s| s.field_code.clone());
        let mut by_area = shift_summary(&all_shifts, |s| self.area(&s.field_code).to_string());
        by_area.extend(shift_summary(&all_shifts, |_| TOTAL.to_string()));

        out.table("rank_entries.csv", &entries_t);
        out.table("shifts.csv", &shifts_t);
        out.table("scatter_data.csv", &scatter_t);
        out.table("field_classes.csv", &classes_t);
        out.table("class_counts_by_area.csv", &counts_t);
        out.table(
            "shift_summary_by_field.csv",
            &summary_table("field_code", &by_field, p),
        );
        out.table(
            "shift_summary_by_area.csv",
            &summary_table("discipline_area", &by_area, p),
        );
        count("ranked_fields", ranked_fields);
        count("rank_entries", entries_t.len());
        Ok(())
    }

    fn stats(
        &self,
        diag: &mut Diagnostics,
        out: &mut Outputs,
        count: &mut impl FnMut(&str, usize),
    ) -> Result<()> {
        let p = self.config.precision;
        let mut stats_field = Table::new(&STATS_FIELD_HEADER, p);
        let mut tests_field = Table::new(&TESTS_HEADER, p);
        let mut pbc_field = Table::new(
            &[
                "field_code",
                "discipline_area",
                "n_m",
                "n_f",
                "r_pb",
                "t_stat",
                "p_value",
                "stars",
            ],
            p,
        );

        // Field-normalized FSS (value over the field's productive mean), pooled per area and overall.
        let mut pooled: BTreeMap<String, Group> = BTreeMap::new();
        let mut field_pbc: BTreeMap<String, Vec<PointBiserialResult<f64>>> = BTreeMap::new();

        for (code, scores) in self.eligible_scores() {
            let area = self.area(code).to_string();
            let group = Group::from_scores(scores.iter().map(|s| (s.gender, s.value)));
            for g in Gender::BOTH {
                if let Some(d) = group.describe(g) {
                    descriptive_row(stats_field.row().text(code).text(&area).text(g), &d);
                }
            }
            self.test_row(diag, &mut tests_field, code, &group)?;

            let (values, genders) = group.flat();
            let r = diag.tolerate(labelled(code, point_biserial(&values, &genders)))?;
            if let Some(r) = &r {
                field_pbc.entry(area.clone()).or_default().push(*r);
                field_pbc.entry(TOTAL.to_string()).or_default().push(*r);
            }
            pbc_field
                .row()
                .text(code)
                .text(&area)
                .text(group.count(Gender::M))
                .text(group.count(Gender::F))
                .opt(r.map(|r| r.r_pb))
                .opt(r.map(|r| r.t_stat))
                .opt(r.map(|r| r.p_value))
                .text(r.map_or("", |r| stars(r.p_value)));

            let productive: Vec<f64> = scores
                .iter()
                .map(|s| s.value)
                .filter(|v| *v > 0.0)
                .collect();
            if productive.is_empty() {
                diag.tolerate::<()>(Err(Error::Degenerate(format!(
                    "field {code}: no productive members, left out of area statistics"
                ))))?;
                continue;
            }
            let field_mean = crate::stats::descriptive::mean(&productive);
            for s in scores {
                for key in [area.clone(), TOTAL.to_string()] {
                    pooled
                        .entry(key)
                        .or_default()
                        .push(s.gender, s.value / field_mean);
                }
            }
        }

        let mut stats_area = Table::new(&STATS_AREA_HEADER, p);
        let mut tests_area = Table::new(&TESTS_HEADER, p);
        let mut pbc_area = Table::new(
            &[
                "discipline_area",
                "fields",
                "pct_significant",
                "min_r",
                "max_r",
                "r_pb",
                "p_value",
                "stars",
            ],
            p,
        );
        let mut bandwidths = Table::new(&["discipline_area", "gender", "values", "bandwidth"], p);
        let mut kde_files = 0;
        let pooled = total_last(pooled);
        for (area, group) in &pooled {
            for g in Gender::BOTH {
                if let Some(d) = group.describe(g) {
                    descriptive_row(stats_area.row().text(area).text(g), &d);
                }
            }
            self.test_row(diag, &mut tests_area, area, group)?;

            let fields = field_pbc.get(area).map(Vec::as_slice).unwrap_or_default();
            let significant = fields.iter().filter(|r| r.p_value < 0.05).count();
            let pct =
                (!fields.is_empty()).then(|| 100.0 * significant as f64 / fields.len() as f64);
            let min_r = fields.iter().map(|r| r.r_pb).reduce(f64::min);
            let max_r = fields.iter().map(|r| r.r_pb).reduce(f64::max);
            let (values, genders) = group.flat();
            let r = diag.tolerate(labelled(area, point_biserial(&values, &genders)))?;
            pbc_area
                .row()
                .text(area)
                .text(fields.len())
                .opt(pct)
                .opt(min_r)
                .opt(max_r)
                .opt(r.map(|r| r.r_pb))
                .opt(r.map(|r| r.p_value))
                .text(r.map_or("", |r| stars(r.p_value)));

            if area == TOTAL {
                continue;
            }
            for g in Gender::BOTH {
                let positive: Vec<f64> = group
                    .values(g)
                    .iter()
                    .copied()
                    .filter(|v| *v > 0.0)
                    .collect();
                let curve = if positive.len() < 2 {
                    Err(Error::Degenerate(format!(
                        "area {area}: {} productive {g} member(s), no density estimate",
                        positive.len()
                    )))
                } else {
                    labelled(
                        &format!("area {area} {g}"),
                        epanechnikov_kde(
                            &positive,
                            self.config.kde_grid,
                            self.config.kde_bandwidth,
                        ),
                    )
                };
                let Some(curve) = diag.tolerate(curve)? else {
                    continue;
                };
                bandwidths
                    .row()
                    .text(area)
                    .text(g)
                    .text(positive.len())
                    .num(curve.bandwidth);
                let mut t = Table::new(&["log_fss", "density"], p);
                for (x, d) in curve.grid.iter().zip(&curve.density) {
                    t.row().num(*x).num(*d);
                }
                out.table(format!("kde_{}_{g}.csv", file_slug(area)), &t);
                kde_files += 1;
            }
        }

        out.table("stats_by_field.csv", &stats_field);
        out.table("stats_by_area.csv", &stats_area);
        out.table("tests_by_field.csv", &tests_field);
        out.table("tests_by_area.csv", &tests_area);
        out.table("pbc_by_field.csv", &pbc_field);
        out.table("pbc_by_area.csv", &pbc_area);
        out.table("kde_bandwidths.csv", &bandwidths);
        count("fields", pbc_field.len());
        count("areas", pooled.len().saturating_sub(1));
        count("kde_curves", kde_files);
        Ok(())
    }

    /// Unproductive-share z-test and FSS comparison, male against female.
    fn test_row(
        &self,
        diag: &mut Diagnostics,
        t: &mut Table,
        group_key: &str,
        g: &Group,
    ) -> Result<()> {
        let (m, f) = (g.values(Gender::M), g.values(Gender::F));
        let zeros = |v: &[f64]| v.iter().filter(|x| **x == 0.0).count() as u64;
        let pct = |v: &[f64]| (!v.is_empty()).then(|| 100.0 * zeros(v) as f64 / v.len() as f64);

        let z = if m.is_empty() || f.is_empty() {
            Err(Error::Degenerate(format!(
                "{group_key}: a gender is absent, no proportion test"
            )))
        } else {
            labelled(
                group_key,
                z_test_proportions::<f64>(zeros(m), m.len() as u64, zeros(f), f.len() as u64),
            )
        };
        let z = diag.tolerate(z)?;

        let mean_test: Result<TestResult<f64>> = if m.len() < 2 || f.len() < 2 {
            Err(Error::Degenerate(format!(
                "{group_key}: fewer than 2 members of a gender, no mean test"
            )))
        } else {
            labelled(
                group_key,
                match self.config.median_test {
                    MedianTest::TTest => t_test_independent(m, f),
                    MedianTest::MannWhitney => mann_whitney_u(m, f),
                },
            )
        };
        let mt = diag.tolerate(mean_test)?;

        t.row()
            .text(group_key)
            .text(m.len())
            .text(f.len())
            .opt(pct(m))
            .opt(pct(f))
            .opt(z.map(|r| r.statistic))
            .opt(z.map(|r| r.p_value))
            .text(z.map_or("", |r| stars(r.p_value)))
            .text(self.config.median_test.as_str())
            .opt(mt.map(|r| r.statistic))
            .opt(mt.map(|r| r.p_value))
            .text(mt.map_or("", |r| stars(r.p_value)));
        Ok(())
    }
}

const STATS_FIELD_HEADER: [&str; 10] = [
    "field_code",
    "discipline_area",
    "gender",
    "count",
    "pct_zero",
    "mean",
    "median",
    "max",
    "stdev",
    "iqr",
];
const STATS_AREA_HEADER: [&str; 9] = [
    "discipline_area",
    "gender",
    "count",
    "pct_zero",
    "mean",
    "median",
    "max",
    "stdev",
    "iqr",
];
const TESTS_HEADER: [&str; 12] = [
    "group",
    "n_m",
    "n_f",
    "pct_unproductive_m",
    "pct_unproductive_f",
    "z",
    "z_p_value",
    "z_stars",
    "mean_test",
    "statistic",
    "p_value",
    "stars",
];

fn descriptive_row(row: super::format::RowBuilder<'_>, d: &Descriptive<f64>) {
    row.text(d.count)
        .num(d.pct_zero)
        .num(d.mean)
        .num(d.median)
        .num(d.max)
        .num(d.stdev)
        .num(d.iqr);
}

fn summary_table(key: &'static str, rows: &[ShiftSummary<f64>], p: super::Precision) -> Table {
    let mut t = Table::new(
        &[
            key, "gender", "count", "mean", "median", "stdev", "min", "max",
        ],
        p,
    );
    for s in rows {
        t.row()
            .text(&s.group)
            .text(s.gender)
            .text(s.count)
            .num(s.mean)
            .num(s.median)
            .num(s.stdev)
            .num(s.min)
            .num(s.max);
    }
    t
}

/// Orders map entries by key but moves the `TOTAL` group after all others.
fn total_last<K: AsTotal + Ord, V>(map: BTreeMap<K, V>) -> Vec<(K, V)> {
    let (mut rest, totals): (Vec<_>, Vec<_>) = map.into_iter().partition(|(k, _)| !k.is_total());
    rest.extend(totals);
    rest
}

trait AsTotal {
    fn is_total(&self) -> bool;
}

impl AsTotal for String {
    fn is_total(&self) -> bool {
        self == TOTAL
    }
}

impl AsTotal for (String, Gender) {
    fn is_total(&self) -> bool {
        self.0 == TOTAL
    }
}

/// File-name-safe form of a group label.
fn file_slug(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Values split by gender, in insertion order.
#[derive(Debug, Default)]
struct Group {
    female: Vec<f64>,
    male: Vec<f64>,
    order: Vec<(Gender, f64)>,
}

impl Group {
    fn from_scores(items: impl Iterator<Item = (Gender, f64)>) -> Self {
        let mut g = Self::default();
        for (gender, v) in items {
            g.push(gender, v);
        }
        g
    }

    fn push(&mut self, gender: Gender, value: f64) {
        match gender {
            Gender::F => self.female.push(value),
            Gender::M => self.male.push(value),
        }
        self.order.push((gender, value));
    }

    fn values(&self, gender: Gender) -> &[f64] {
        match gender {
            Gender::F => &self.female,
            Gender::M => &self.male,
        }
    }

    fn count(&self, gender: Gender) -> usize {
        self.values(gender).len()
    }

    fn describe(&self, gender: Gender) -> Option<Descriptive<f64>> {
        descriptive_stats(self.values(gender)).ok()
    }

    fn flat(&self) -> (Vec<f64>, Vec<Gender>) {
        (
            self.order.iter().map(|(_, v)| *v).collect(),
            self.order.iter().map(|(g, _)| *g).collect(),
        )
    }
}
