//! Citation baselines per (year, subject category) and field-normalized impact.

use std::collections::BTreeMap;
use std::path::Path;

use crate::corpus::{Corpus, Publication};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::table::read_table_from;

pub const BASELINES_HEADER: [&str; 4] = [
    "year",
    "subject_category",
    "mean_cited_citations",
    "cited_publications",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineCell<T> {
    /// Mean citations over cited publications in the cell.
    pub mean: T,
    /// Number of cited publications; `None` for user-supplied cells.
    pub cited: Option<u64>,
    cited_sum: Option<u64>,
}

impl<T: Scalar> BaselineCell<T> {
    /// `citations / mean`. Computed cells evaluate it as
    /// `(citations * cited) / cited_sum` from exact integers, so rescaling every
    /// count in the cell by a constant leaves the ratio bit-identical.
    pub fn normalize(&self, citations: u64) -> T {
        match (self.cited, self.cited_sum) {
            (Some(n), Some(sum)) => {
                if let Some(num) = citations.checked_mul(n) {
                    return T::from_u64_exact(num) / T::from_u64_exact(sum);
                }
                T::from_u64_exact(citations) / self.mean
            }
            _ => T::from_u64_exact(citations) / self.mean,
        }
    }
}

/// Map from (year, subject category) to the mean citations of cited publications.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CitationBaseline<T> {
    cells: BTreeMap<(i32, String), BaselineCell<T>>,
}

impl<T: Scalar> CitationBaseline<T> {
    pub fn get(&self, year: i32, category: &str) -> Option<&BaselineCell<T>> {
        self.cells.get(&(year, category.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &str, &BaselineCell<T>)> {
        self.cells
            .iter()
            .map(|((y, c), cell)| (*y, c.as_str(), cell))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Replaces or adds cells with externally supplied means.
    pub fn apply_override(&mut self, year: i32, category: &str, mean: T) -> Result<()> {
        if !(mean > T::zero() && mean.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "baseline for ({year}, {category}) must be positive, got {mean}"
            )));
        }
        self.cells.insert(
            (year, category.to_string()),
            BaselineCell {
                mean,
                cited: None,
                cited_sum: None,
            },
        );
        Ok(())
    }

    /// Reads a `year,subject_category,mean_cited_citations[,cited_publications]`
    /// file and applies each row as an override.
    pub fn apply_override_file(&mut self, path: &Path) -> Result<usize> {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("baselines.csv")
            .to_string();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let rows = read_table_from(file, path, &name, &BASELINES_HEADER, 3)?;
        for row in &rows {
            let year: i32 = row.parse("year")?;
            let category = row.required("subject_category")?;
            let mean: f64 = row.parse("mean_cited_citations")?;
            self.apply_override(year, category, T::lit(mean))
                .map_err(|e| match e {
                    Error::InvalidInput(msg) => {
                        Error::malformed(row.location(), "mean_cited_citations", msg)
                    }
                    other => other,
                })?;
        }
        Ok(rows.len())
    }
}

/// Builds baselines from the corpus: for each (year, category) cell holding at
/// least one cited publication, the mean citation count of its cited
/// publications. Multi-category publications count once in every cell they name.
pub fn compute_baselines<T: Scalar>(corpus: &Corpus) -> CitationBaseline<T> {
    let mut tallies: BTreeMap<(i32, String), (u64, u64)> = BTreeMap::new();
    for p in corpus.publications() {
        if p.citations == 0 {
            continue;
        }
        for category in &p.subject_categories {
            let entry = tallies.entry((p.year, category.clone())).or_default();
            entry.0 += 1;
            entry.1 += p.citations;
        }
    }
    let cells = tallies
        .into_iter()
        .map(|(key, (n, sum))| {
            let mean = T::from_u64_exact(sum) / T::from_u64_exact(n);
            (
                key,
                BaselineCell {
                    mean,
                    cited: Some(n),
                    cited_sum: Some(sum),
                },
            )
        })
        .collect();
    CitationBaseline { cells }
}

/// Citations relative to the baseline, averaged over the publication's
/// categories that have one. Zero for uncited publications.
pub fn normalized_impact<T: Scalar>(
    publication: &Publication,
    baselines: &CitationBaseline<T>,
) -> Result<T> {
    if publication.citations == 0 {
        return Ok(T::zero());
    }
    let ratios: Vec<T> = publication
        .subject_categories
        .iter()
        .filter_map(|c| baselines.get(publication.year, c))
        .map(|cell| cell.normalize(publication.citations))
        .collect();
    if ratios.is_empty() {
        return Err(Error::Inconsistent(format!(
            "publication `{}` is cited but no baseline exists for year {} in {}",
            publication.id,
            publication.year,
            publication.subject_categories.join(";")
        )));
    }
    let n = T::from_count(ratios.len());
    Ok(ratios.into_iter().sum::<T>() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Gender;
    use crate::corpus::{
        BylineConvention, BylineSlot, CorpusBuilder, Field, RankCode, Researcher, Window,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn publication(id: &str, year: i32, categories: &[&str], citations: u64) -> Publication {
        Publication {
            id: id.into(),
            year,
            subject_categories: categories.iter().map(|c| c.to_string()).collect(),
            citations,
            byline: vec![BylineSlot::internal("r1", "u1")],
        }
    }

    fn corpus_of(publications: Vec<Publication>) -> Corpus {
        let mut b = CorpusBuilder::new(Window::default());
        b.add_field(
            Field {
                code: "F1".into(),
                discipline_area: "A".into(),
                byline_convention: BylineConvention::Alphabetical,
            },
            None,
        )
        .unwrap();
        b.add_wage(RankCode::from("full"), 1.0, None).unwrap();
        b.add_researcher(
            Researcher {
                id: "r1".into(),
                gender: Gender::F,
                rank: RankCode::from("full"),
                field_code: "F1".into(),
                years_active: 5,
                affiliation_id: "u1".into(),
            },
            None,
        )
        .unwrap();
        for p in publications {
            b.add_publication(p, None).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn baseline_uses_cited_publications_only() {
        let pubs = [3, 0, 5, 0, 4]
            .iter()
            .enumerate()
            .map(|(i, c)| publication(&format!("p{i}"), 2007, &["CAT"], *c))
            .collect();
        let baselines = compute_baselines::<f64>(&corpus_of(pubs));
        let cell = baselines.get(2007, "CAT").unwrap();
        assert_eq!(cell.mean, 4.0);
        assert_eq!(cell.cited, Some(3));
    }

    #[test]
    fn uncited_cell_is_absent() {
        let pubs = vec![
            publication("a", 2007, &["CAT"], 0),
            publication("b", 2007, &["CAT"], 0),
        ];
        let baselines = compute_baselines::<f64>(&corpus_of(pubs));
        assert!(baselines.get(2007, "CAT").is_none());
        assert!(baselines.is_empty());
    }

    #[test]
    fn two_year_two_category_means() {
        // Hand tally: (2006,X) cited {2,4} -> 3; (2006,Y) cited {9} -> 9;
        // (2007,X) cited {1,1,7} -> 3; (2007,Y) nothing cited -> absent.
        let pubs = vec![
            publication("a", 2006, &["X"], 2),
            publication("b", 2006, &["X"], 4),
            publication("c", 2006, &["X"], 0),
            publication("d", 2006, &["Y"], 9),
            publication("e", 2007, &["X"], 1),
            publication("f", 2007, &["X"], 1),
            publication("g", 2007, &["X"], 7),
            publication("h", 2007, &["Y"], 0),
        ];
        let b = compute_baselines::<f64>(&corpus_of(pubs));
        assert_eq!(b.get(2006, "X").unwrap().mean, 3.0);
        assert_eq!(b.get(2006, "Y").unwrap().mean, 9.0);
        assert_eq!(b.get(2007, "X").unwrap().mean, 3.0);
        assert!(b.get(2007, "Y").is_none());
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn normalized_impact_examples() {
        let mut b = CitationBaseline::<f64>::default();
        b.apply_override(2008, "A", 5.0).unwrap();
        b.apply_override(2008, "B", 3.0).unwrap();
        b.apply_override(2008, "C", 6.0).unwrap();
        assert_eq!(
            normalized_impact(&publication("p", 2008, &["A"], 10), &b).unwrap(),
            2.0
        );
        assert_eq!(
            normalized_impact(&publication("p", 2008, &["A", "B"], 0), &b).unwrap(),
            0.0
        );
        assert_eq!(
            normalized_impact(&publication("p", 2008, &["B", "C"], 6), &b).unwrap(),
            1.5
        );
    }

    #[test]
    fn cited_publication_without_any_baseline_is_inconsistent() {
        let b = CitationBaseline::<f64>::default();
        let err = normalized_impact(&publication("p", 2008, &["A"], 3), &b).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn override_rejects_non_positive_mean() {
        let mut b = CitationBaseline::<f64>::default();
        assert!(b.apply_override(2008, "A", 0.0).is_err());
    }

    #[test]
    fn override_file_replaces_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("baselines.csv");
        std::fs::write(
            &path,
            "year,subject_category,mean_cited_citations\n2006,X,12.5\n",
        )
        .unwrap();
        let pubs = vec![
            publication("a", 2006, &["X"], 2),
            publication("b", 2006, &["Y"], 4),
        ];
        let mut b = compute_baselines::<f64>(&corpus_of(pubs));
        assert_eq!(b.apply_override_file(&path).unwrap(), 1);
        assert_eq!(b.get(2006, "X").unwrap().mean, 12.5);
        assert_eq!(b.get(2006, "X").unwrap().cited, None);
        assert_eq!(b.get(2006, "Y").unwrap().mean, 4.0);

        std::fs::write(
            &path,
            "year,subject_category,mean_cited_citations\n2006,X,-1\n",
        )
        .unwrap();
        assert!(b.apply_override_file(&path).is_err());
    }

    proptest! {
        #[test]
        fn impact_zero_iff_uncited(cites in prop::collection::vec(0u64..50, 1..30)) {
            let pubs: Vec<_> = cites.iter().enumerate()
                .map(|(i, c)| publication(&format!("p{i}"), 2009, &["C"], *c)).collect();
            let corpus = corpus_of(pubs);
            let b = compute_baselines::<f64>(&corpus);
            for p in corpus.publications() {
                let v = normalized_impact(p, &b).unwrap();
                prop_assert_eq!(v == 0.0, p.citations == 0);
            }
        }

        #[test]
        fn cited_mean_is_one_and_scaling_is_invisible(
            cites in prop::collection::vec(0u64..500, 1..40),
            k in 1u64..20,
        ) {
            prop_assume!(cites.iter().any(|c| *c > 0));
            let make = |factor: u64| corpus_of(cites.iter().enumerate()
                .map(|(i, c)| publication(&format!("p{i}"), 2009, &["C"], c * factor)).collect());
            let base = make(1);
            let scaled = make(k);
            let b1 = compute_baselines::<f64>(&base);
            let bk = compute_baselines::<f64>(&scaled);
            assert_abs_diff_eq!(bk.get(2009, "C").unwrap().mean, b1.get(2009, "C").unwrap().mean * k as f64, epsilon = 1e-9);

            let impacts: Vec<f64> = base.publications().iter()
                .map(|p| normalized_impact(p, &b1).unwrap()).collect();
            for (p, v) in scaled.publications().iter().zip(&impacts) {
                prop_assert_eq!(normalized_impact(p, &bk).unwrap(), *v);
            }
            let cited: Vec<f64> = impacts.into_iter().filter(|v| *v > 0.0).collect();
            let mean = cited.iter().sum::<f64>() / cited.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-9);
        }
    }
}
