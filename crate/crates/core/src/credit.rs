//! Fractional author credit from byline position and affiliation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::corpus::{BylineConvention, BylineSlot, Corpus, Publication};
use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::scalar::Scalar;

/// How a share vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShareScheme {
    /// Alphabetical byline: 1/N each.
    Uniform,
    /// First and last authors share an affiliation.
    Intramural,
    /// First and last authors have different affiliations.
    Extramural,
    /// Contribution-ordered byline too short for positional weights: 1/N each.
    UniformFallback,
}

impl ShareScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            ShareScheme::Uniform => "uniform",
            ShareScheme::Intramural => "intramural",
            ShareScheme::Extramural => "extramural",
            ShareScheme::UniformFallback => "uniform_fallback",
        }
    }
}

/// Positional credit weights for contribution-ordered bylines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CreditWeights<T> {
    /// Share of each of first and last author when they share an affiliation.
    pub intramural_first_last: T,
    /// Total share split evenly among the remaining authors in that case.
    pub intramural_others: T,
    /// Share of each of first and last author otherwise.
    pub extramural_first_last: T,
    /// Share of each of second and second-to-last author otherwise.
    pub extramural_second: T,
    /// Total share split evenly among the remaining authors otherwise.
    pub extramural_others: T,
}

impl<T: Scalar> Default for CreditWeights<T> {
    fn default() -> Self {
        Self {
            intramural_first_last: T::lit(0.40),
            intramural_others: T::lit(0.20),
            extramural_first_last: T::lit(0.30),
            extramural_second: T::lit(0.15),
            extramural_others: T::lit(0.10),
        }
    }
}

impl<T: Scalar> CreditWeights<T> {
    const KEYS: [&'static str; 5] = [
        "intramural_first_last",
        "intramural_others",
        "extramural_first_last",
        "extramural_second",
        "extramural_others",
    ];

    /// Every weight positive and each scheme summing to one.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.intramural_first_last,
            self.intramural_others,
            self.extramural_first_last,
            self.extramural_second,
            self.extramural_others,
        ];
        if all.iter().any(|w| !(*w > T::zero() && w.is_finite())) {
            return Err(Error::Config(
                "credit weights must be strictly positive".into(),
            ));
        }
        let two = T::lit(2.0);
        let tol = T::lit(1e-9);
        let intramural = two * self.intramural_first_last + self.intramural_others;
        let extramural = two * self.extramural_first_last
            + two * self.extramural_second
            + self.extramural_others;
        if (intramural - T::one()).abs() > tol || (extramural - T::one()).abs() > tol {
            return Err(Error::Config(format!(
                "credit weights must sum to 1 per scheme (intramural {intramural}, extramural {extramural})"
            )));
        }
        Ok(())
    }

    /// Reads `key=value` lines; unspecified keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let kv = KeyValues::from_file(path)?;
        let mut weights = Self::default();
        for (key, value) in kv.iter() {
            let parsed = value.parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "{}: `{key}` is not a number: `{value}`",
                    path.display()
                ))
            })?;
            let slot = match key {
                "intramural_first_last" => &mut weights.intramural_first_last,
                "intramural_others" => &mut weights.intramural_others,
                "extramural_first_last" => &mut weights.extramural_first_last,
                "extramural_second" => &mut weights.extramural_second,
                "extramural_others" => &mut weights.extramural_others,
                other => {
                    return Err(Error::Config(format!(
                        "{}: unknown weight `{other}` (expected one of {})",
                        path.display(),
                        Self::KEYS.join(", ")
                    )))
                }
            };
            *slot = T::lit(parsed);
        }
        weights.validate()?;
        Ok(weights)
    }
}

/// Shares aligned with byline slots; sums to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareVector<T> {
    pub shares: Vec<T>,
    pub scheme: ShareScheme,
}

impl<T: Scalar> ShareVector<T> {
    fn uniform(n: usize, scheme: ShareScheme) -> Self {
        let each = T::one() / T::from_count(n);
        Self {
            shares: vec![each; n],
            scheme,
        }
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }
}

/// Splits one unit of credit across a byline.
///
/// Alphabetical bylines get 1/N each. Contribution-ordered bylines branch on
/// whether the first and last slot share an `affiliation_id`: if so, first
/// and last get `intramural_first_last` each and the rest share
/// `intramural_others` (needs N >= 3); otherwise first and last get
/// `extramural_first_last`, second and second-to-last get `extramural_second`
/// and the rest share `extramural_others` (needs N >= 5). Shorter bylines fall
/// back to 1/N and are marked [`ShareScheme::UniformFallback`].
pub fn fractional_shares<T: Scalar>(
    byline: &[BylineSlot],
    convention: BylineConvention,
    weights: &CreditWeights<T>,
) -> Result<ShareVector<T>> {
    let n = byline.len();
    if n == 0 {
        return Err(Error::EmptyByline);
    }
    if convention == BylineConvention::Alphabetical {
        return Ok(ShareVector::uniform(n, ShareScheme::Uniform));
    }

    let same_affiliation = byline[0].affiliation_id == byline[n - 1].affiliation_id;
    if same_affiliation && n >= 3 {
        let middle = weights.intramural_others / T::from_count(n - 2);
        let mut shares = vec![middle; n];
        shares[0] = weights.intramural_first_last;
        shares[n - 1] = weights.intramural_first_last;
        Ok(ShareVector {
            shares,
            scheme: ShareScheme::Intramural,
        })
    } else if !same_affiliation && n >= 5 {
        let rest = weights.extramural_others / T::from_count(n - 4);
        let mut shares = vec![rest; n];
        shares[0] = weights.extramural_first_last;
        shares[n - 1] = weights.extramural_first_last;
        shares[1] = weights.extramural_second;
        shares[n - 2] = weights.extramural_second;
        Ok(ShareVector {
            shares,
            scheme: ShareScheme::Extramural,
        })
    } else {
        Ok(ShareVector::uniform(n, ShareScheme::UniformFallback))
    }
}

/// Convention applied to a publication: contribution-ordered if the field of
/// any in-corpus author uses contribution order, alphabetical otherwise.
pub fn publication_convention(corpus: &Corpus, publication: &Publication) -> BylineConvention {
    let any_ordered = publication
        .byline
        .iter()
        .filter_map(|slot| slot.researcher_id.as_deref())
        .filter_map(|id| corpus.researcher(id))
        .filter_map(|r| corpus.field(&r.field_code))
        .any(|f| f.byline_convention == BylineConvention::ContributionOrdered);
    if any_ordered {
        BylineConvention::ContributionOrdered
    } else {
        BylineConvention::Alphabetical
    }
}

/// Share vectors keyed by publication id.
pub type ShareSet<T> = BTreeMap<String, ShareVector<T>>;

/// Computes the share vector of every publication in the corpus.
pub fn compute_shares<T: Scalar>(
    corpus: &Corpus,
    weights: &CreditWeights<T>,
) -> Result<ShareSet<T>> {
    corpus
        .publications()
        .iter()
        .map(|p| {
            let convention = publication_convention(corpus, p);
            let shares = fractional_shares(&p.byline, convention, weights)
                .map_err(|e| Error::InvalidInput(format!("publication `{}`: {e}", p.id)))?;
            Ok((p.id.clone(), shares))
        })
        .collect()
}
